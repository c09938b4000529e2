#include "depq/harness.hpp"

#include <algorithm>
#include <chrono>
#include <latch>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "depq/list_depq.hpp"

namespace depq::harness {

const char* to_string(Impl i) {
  switch (i) {
    case Impl::ListDepq: return "list-depq";
    case Impl::DualHeap: return "dual-heap";
    case Impl::DualList: return "dual-list";
  }
  return "?";
}

Impl parse_impl(const std::string& s) {
  if (s == "list-depq") return Impl::ListDepq;
  if (s == "dual-heap") return Impl::DualHeap;
  if (s == "dual-list") return Impl::DualList;
  throw ConfigError("unknown impl: " + s);
}

MultiConsumerMode parse_mode(const std::string& s) {
  if (s == "two-locks") return MultiConsumerMode::TwoLocks;
  if (s == "combining") return MultiConsumerMode::Combining;
  throw ConfigError("unknown mode: " + s);
}

ReclaimMode parse_reclaim(const std::string& s) {
  if (s == "deferred") return ReclaimMode::Deferred;
  if (s == "epoch") return ReclaimMode::Epoch;
  throw ConfigError("unknown reclaim mode: " + s);
}

const char* to_string(ReclaimMode m) { return m == ReclaimMode::Deferred ? "deferred" : "epoch"; }

void validate(const WorkloadConfig& cfg) {
  if (cfg.threads_insert < 0 || cfg.threads_min < 0 || cfg.threads_max < 0)
    throw ConfigError("thread counts must be non-negative");
  if (cfg.threads_insert + cfg.threads_min + cfg.threads_max < 1)
    throw ConfigError("at least one worker thread is required");
  if (cfg.threads_insert + cfg.threads_min + cfg.threads_max > 200)
    throw ConfigError("at most 200 worker threads are supported");
  if (cfg.key_lo > cfg.key_hi) throw ConfigError("key range is empty");
  if (cfg.ops_per_thread.has_value() == cfg.duration_ms.has_value())
    throw ConfigError("exactly one of --ops and --duration-ms is required");
  if (cfg.sequential && cfg.duration_ms) throw ConfigError("sequential runs need --ops");
  if (cfg.batch_cap == 0) throw ConfigError("batch cap must be at least 1");
  if (cfg.reclaim == ReclaimMode::Epoch && cfg.impl != Impl::ListDepq)
    throw ConfigError("epoch reclamation applies to list-depq only");
  if (cfg.inject_bug && cfg.impl != Impl::ListDepq)
    throw ConfigError("bug injection applies to list-depq only");
}

std::unique_ptr<Depq> make_depq(const WorkloadConfig& cfg) {
  switch (cfg.impl) {
    case Impl::ListDepq: {
      ListDepqOptions o;
      o.batch_cap = cfg.batch_cap;
      o.reclaim = cfg.reclaim;
      o.skip_reservation = cfg.inject_bug;
      return std::make_unique<ListDepq>(o);
    }
    case Impl::DualHeap:
      return make_multi_consumer(make_dual_heap(cfg.optional_delete), cfg.mode, cfg.batch_cap);
    case Impl::DualList:
      return make_multi_consumer(make_dual_list(), cfg.mode, cfg.batch_cap);
  }
  throw ConfigError("unknown impl");
}

namespace {

enum class Role : std::uint8_t { Insert, Min, Max };

struct Worker {
  Role role;
  std::mt19937_64 rng;
  std::uniform_int_distribution<UserKey> keys;
  std::vector<UserKey> inserted;
  std::vector<UserKey> returned;
  std::uint64_t calls = 0;
  std::uint64_t empties = 0;

  Worker(Role r, std::uint64_t seed, int idx, UserKey lo, UserKey hi)
      : role(r), keys(lo, hi) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(idx)};
    rng.seed(seq);
  }

  void step(Depq& d) {
    ++calls;
    switch (role) {
      case Role::Insert: {
        const UserKey k = keys(rng);
        d.insert(k);
        inserted.push_back(k);
        break;
      }
      case Role::Min:
      case Role::Max: {
        const auto r = role == Role::Min ? d.extract_min() : d.extract_max();
        if (r) {
          returned.push_back(*r);
        } else {
          ++empties;
        }
        break;
      }
    }
  }
};

}  // namespace

RunReport run_bench(const WorkloadConfig& cfg) {
  validate(cfg);
  auto depq = make_depq(cfg);

  std::vector<UserKey> prefilled;
  {
    std::seed_seq seq{cfg.seed, std::uint64_t{0xF111}};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<UserKey> keys(cfg.key_lo, cfg.key_hi);
    for (std::uint64_t i = 0; i < cfg.prefill; ++i) {
      const UserKey k = keys(rng);
      depq->insert(k);
      prefilled.push_back(k);
    }
  }

  std::vector<Worker> workers;
  for (int i = 0; i < cfg.threads_insert; ++i)
    workers.emplace_back(Role::Insert, cfg.seed, i, cfg.key_lo, cfg.key_hi);
  for (int i = 0; i < cfg.threads_min; ++i)
    workers.emplace_back(Role::Min, cfg.seed, i, cfg.key_lo, cfg.key_hi);
  for (int i = 0; i < cfg.threads_max; ++i)
    workers.emplace_back(Role::Max, cfg.seed, i, cfg.key_lo, cfg.key_hi);

  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.sequential) {
    for (std::uint64_t r = 0; r < *cfg.ops_per_thread; ++r)
      for (Worker& w : workers) w.step(*depq);
  } else {
    std::latch start(static_cast<std::ptrdiff_t>(workers.size()));
    std::vector<std::thread> threads;
    const auto deadline =
        t0 + std::chrono::milliseconds(cfg.duration_ms.value_or(0));
    for (Worker& w : workers) {
      threads.emplace_back([&, wp = &w] {
        start.arrive_and_wait();
        if (cfg.ops_per_thread) {
          for (std::uint64_t i = 0; i < *cfg.ops_per_thread; ++i) wp->step(*depq);
        } else {
          do {
            for (int i = 0; i < 64; ++i) wp->step(*depq);
          } while (std::chrono::steady_clock::now() < deadline);
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  const auto t1 = std::chrono::steady_clock::now();

  RunReport r;
  r.impl = to_string(cfg.impl);
  r.mode = cfg.impl == Impl::ListDepq ? "combining" : to_string(cfg.mode);
  r.reclaim = to_string(cfg.reclaim);
  r.threads_insert = cfg.threads_insert;
  r.threads_min = cfg.threads_min;
  r.threads_max = cfg.threads_max;
  r.seed = cfg.seed;
  r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  std::vector<UserKey> inserted = prefilled;
  for (const Worker& w : workers) {
    inserted.insert(inserted.end(), w.inserted.begin(), w.inserted.end());
    r.returned.insert(r.returned.end(), w.returned.begin(), w.returned.end());
    switch (w.role) {
      case Role::Insert: r.inserts += w.calls; break;
      case Role::Min:
        r.extract_min_calls += w.calls;
        r.extract_min_empty += w.empties;
        break;
      case Role::Max:
        r.extract_max_calls += w.calls;
        r.extract_max_empty += w.empties;
        break;
    }
  }
  const std::vector<UserKey> remaining = depq->quiescent_contents();
  std::sort(inserted.begin(), inserted.end());
  std::sort(r.returned.begin(), r.returned.end());
  std::vector<UserKey> accounted = r.returned;
  accounted.insert(accounted.end(), remaining.begin(), remaining.end());
  std::sort(accounted.begin(), accounted.end());
  r.inserted_total = inserted.size();
  r.returned_total = r.returned.size();
  r.remaining_total = remaining.size();
  r.accounting_ok = inserted == accounted;

  r.stats = depq->stats();
  r.charging_ok = r.stats.failed_reserve_min <= r.stats.successful_max &&
                  r.stats.failed_reserve_max <= r.stats.successful_min;
  r.audit_message = depq->audit();
  r.audit_ok = r.audit_message.empty();
  return r;
}

std::string to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["impl"] = r.impl;
  j["mode"] = r.mode;
  j["reclaim"] = r.reclaim;
  j["threads"] = {{"insert", r.threads_insert}, {"min", r.threads_min}, {"max", r.threads_max}};
  j["seed"] = r.seed;
  j["wall_ms"] = r.wall_ms;
  j["ops"] = {{"insert", r.inserts},
              {"extract_min", r.extract_min_calls},
              {"extract_max", r.extract_max_calls},
              {"extract_min_empty", r.extract_min_empty},
              {"extract_max_empty", r.extract_max_empty}};
  const std::uint64_t total = r.inserts + r.extract_min_calls + r.extract_max_calls;
  j["throughput_ops_per_sec"] = {{"total", r.ops_per_sec(total)},
                                 {"insert", r.ops_per_sec(r.inserts)},
                                 {"extract_min", r.ops_per_sec(r.extract_min_calls)},
                                 {"extract_max", r.ops_per_sec(r.extract_max_calls)}};
  j["retries"] = {{"failed_reserve_min", r.stats.failed_reserve_min},
                  {"failed_reserve_max", r.stats.failed_reserve_max},
                  {"failed_insert_cas", r.stats.failed_insert_cas}};
  auto histogram = [](const std::vector<std::uint64_t>& h) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] != 0) out[std::to_string(i)] = h[i];
    return out;
  };
  j["batch_sizes"] = {{"min", histogram(r.stats.batch_sizes_min)},
                      {"max", histogram(r.stats.batch_sizes_max)}};
  j["retired_nodes"] = r.stats.retired;
  j["deallocated_nodes"] = r.stats.deallocated;
  j["accounting"] = {{"inserted", r.inserted_total},
                     {"returned", r.returned_total},
                     {"remaining", r.remaining_total},
                     {"ok", r.accounting_ok}};
  j["charging_ok"] = r.charging_ok;
  j["audit"] = r.audit_ok ? "pass" : "fail";
  if (!r.audit_ok) j["audit_message"] = r.audit_message;
  return j.dump();
}

std::string csv_header() {
  return "schema,impl,mode,reclaim,threads_insert,threads_min,threads_max,seed,wall_ms,"
         "inserts,extract_min,extract_max,extract_min_empty,extract_max_empty,ops_per_sec,"
         "failed_reserve_min,failed_reserve_max,failed_insert_cas,batches_min,batches_max,"
         "retired,deallocated,inserted,returned,remaining,accounting_ok,charging_ok,audit";
}

std::string to_csv(const RunReport& r) {
  auto batches = [](const std::vector<std::uint64_t>& h) {
    std::uint64_t n = 0;
    for (auto c : h) n += c;
    return n;
  };
  std::ostringstream os;
  const std::uint64_t total = r.inserts + r.extract_min_calls + r.extract_max_calls;
  os << 1 << ',' << r.impl << ',' << r.mode << ',' << r.reclaim << ',' << r.threads_insert << ','
     << r.threads_min << ',' << r.threads_max << ',' << r.seed << ',' << r.wall_ms << ','
     << r.inserts << ',' << r.extract_min_calls << ',' << r.extract_max_calls << ','
     << r.extract_min_empty << ',' << r.extract_max_empty << ',' << r.ops_per_sec(total) << ','
     << r.stats.failed_reserve_min << ',' << r.stats.failed_reserve_max << ','
     << r.stats.failed_insert_cas << ',' << batches(r.stats.batch_sizes_min) << ','
     << batches(r.stats.batch_sizes_max) << ',' << r.stats.retired << ',' << r.stats.deallocated
     << ',' << r.inserted_total << ',' << r.returned_total << ',' << r.remaining_total << ','
     << (r.accounting_ok ? 1 : 0) << ',' << (r.charging_ok ? 1 : 0) << ','
     << (r.audit_ok ? "pass" : "fail");
  return os.str();
}

StressResult run_stress(const StressConfig& cfg, std::ostream* capture, bool keep_histories) {
  if (cfg.min_threads < 1 || cfg.max_threads < cfg.min_threads)
    throw ConfigError("invalid window thread range");
  if (cfg.max_ops < 0 || static_cast<std::size_t>(cfg.max_ops) > cfg.check.max_completed_ops)
    throw ConfigError("window op count exceeds the checker bound");
  if (cfg.windows < 0) throw ConfigError("window count must be non-negative");

  StressResult out;
  std::mt19937_64 rng(cfg.base.seed);
  for (int w = 0; w < cfg.windows; ++w) {
    auto depq = make_depq(cfg.base);
    const int nthreads = std::uniform_int_distribution<int>(cfg.min_threads, cfg.max_threads)(rng);
    const int total_ops = std::uniform_int_distribution<int>(0, cfg.max_ops)(rng);
    const int prefill = std::min(total_ops, std::uniform_int_distribution<int>(0, 3)(rng));

    // Distinct keys within a window make wrong answers easy to pin down.
    std::vector<UserKey> pool(100);
    for (int i = 0; i < 100; ++i) pool[i] = i;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t next_key = 0;

    struct Planned {
      OpKind kind;
      UserKey key;
    };
    std::vector<std::vector<Planned>> plans(nthreads);
    for (int i = prefill; i < total_ops; ++i) {
      const int t = std::uniform_int_distribution<int>(0, nthreads - 1)(rng);
      const int roll = std::uniform_int_distribution<int>(0, 3)(rng);
      const OpKind k = roll < 2 ? OpKind::Insert : (roll == 2 ? OpKind::ExtractMin : OpKind::ExtractMax);
      plans[t].push_back({k, k == OpKind::Insert ? pool[next_key++] : 0});
    }

    // Thread index nthreads is the prefill thread.
    lincheck::Recorder rec(*depq, nthreads + 1);
    for (int i = 0; i < prefill; ++i) rec.insert(nthreads, pool[next_key++]);

    std::vector<std::uint64_t> yield_seeds(nthreads);
    for (auto& s : yield_seeds) s = rng();
    std::latch start(nthreads);
    std::vector<std::thread> threads;
    for (int t = 0; t < nthreads; ++t) {
      threads.emplace_back([&, t] {
        std::mt19937_64 local(yield_seeds[t]);
        start.arrive_and_wait();
        for (const Planned& p : plans[t]) {
          if (local() % 2 == 0) std::this_thread::yield();
          switch (p.kind) {
            case OpKind::Insert: rec.insert(t, p.key); break;
            case OpKind::ExtractMin: rec.extract_min(t); break;
            case OpKind::ExtractMax: rec.extract_max(t); break;
          }
        }
      });
    }
    for (auto& th : threads) th.join();

    lincheck::History h = rec.history();
    if (capture != nullptr) {
      lincheck::write_jsonl(*capture, h);
      *capture << '\n';
    }
    const auto result = lincheck::check(h, cfg.check);
    ++out.windows;
    switch (result.verdict) {
      case lincheck::Verdict::Linearizable: ++out.linearizable; break;
      case lincheck::Verdict::NotLinearizable: ++out.not_linearizable; break;
      case lincheck::Verdict::BudgetExceeded: ++out.budget_exceeded; break;
    }
    if (result.verdict != lincheck::Verdict::Linearizable && !out.first_failure) {
      out.first_failure = w;
      out.failing = h;
    }
    if (keep_histories) out.histories.push_back(std::move(h));
  }
  return out;
}

}  // namespace depq::harness
