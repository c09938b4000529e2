#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "depq/sched.hpp"

namespace depq {

namespace detail {

/// Per-thread cache of the spare record this thread owns for each combining
/// instance, keyed by instance uid. Bounded; evicting an entry just makes the
/// thread allocate a new record from the instance's pool next time.
class RecordCache {
 public:
  static constexpr std::size_t kMaxEntries = 64;

  static void* lookup(std::uint64_t uid) {
    for (auto& [id, rec] : entries())
      if (id == uid) return rec;
    return nullptr;
  }
  static void store(std::uint64_t uid, void* rec) {
    auto& e = entries();
    for (auto& [id, r] : e) {
      if (id == uid) {
        r = rec;
        return;
      }
    }
    if (e.size() >= kMaxEntries) e.erase(e.begin());
    e.emplace_back(uid, rec);
  }

 private:
  static std::vector<std::pair<std::uint64_t, void*>>& entries() {
    thread_local std::vector<std::pair<std::uint64_t, void*>> cache;
    return cache;
  }
};

inline std::atomic<std::uint64_t> g_combiner_uid{1};

inline void cpu_relax() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_ia32_pause();
#endif
}

}  // namespace detail

/// Counters maintained by a combining instance. Fields other than `announces`
/// are written only by the current combiner; read them at quiescence.
struct CombinerStats {
  std::uint64_t announces = 0;
  std::uint64_t applies = 0;
  std::uint64_t batches = 0;
  std::uint64_t finalizes = 0;
  std::uint64_t max_active_combiners = 0;
  std::uint64_t exclusion_violations = 0;
  std::uint64_t finalize_order_violations = 0;
  std::vector<std::uint64_t> batch_sizes;  // index = batch size
};

/// Queue-lock style combining (CC-Synch). Each caller swaps a fresh record
/// into the tail, publishes its request into the record it got back, and
/// spins on that record. The thread whose record is released without being
/// completed becomes the combiner: it serves up to batch_cap requests in FIFO
/// order, runs `finalize` once, and hands the role to the next waiter.
template <typename Request, typename Result>
class Combiner {
 public:
  using ApplyFn = std::function<Result(Request&)>;
  using FinalizeFn = std::function<void()>;

  static constexpr std::size_t kDefaultBatchCap = 64;

  Combiner(std::size_t batch_cap, ApplyFn apply, FinalizeFn finalize = {})
      : uid_(detail::g_combiner_uid.fetch_add(1, std::memory_order_relaxed)),
        batch_cap_(batch_cap),
        apply_(std::move(apply)),
        finalize_(std::move(finalize)) {
    if (batch_cap_ == 0) throw std::invalid_argument("Combiner: batch_cap must be at least 1");
    if (!apply_) throw std::invalid_argument("Combiner: apply function is required");
    Record* dummy = allocate_record();
    dummy->wait.store(false, std::memory_order_relaxed);
    tail_.store(dummy, std::memory_order_release);
    stats_.batch_sizes.assign(batch_cap_ + 1, 0);
  }

  Combiner(const Combiner&) = delete;
  Combiner& operator=(const Combiner&) = delete;

  std::size_t batch_cap() const { return batch_cap_; }

  /// Announces `req` and blocks until some combiner has applied it.
  Result announce(Request req) {
    announces_.fetch_add(1, std::memory_order_relaxed);
    Record* next = own_record();
    next->next.store(nullptr, std::memory_order_relaxed);
    next->wait.store(true, std::memory_order_relaxed);
    next->completed.store(false, std::memory_order_relaxed);

    std::uint64_t lo = 0;
    if (trace_enabled_) lo = trace_clock_.fetch_add(1, std::memory_order_acq_rel);
    Record* cur = tail_.exchange(next, std::memory_order_acq_rel);
    if (trace_enabled_) {
      cur->announce_lo = lo;
      cur->announce_hi = trace_clock_.fetch_add(1, std::memory_order_acq_rel);
    }
    cur->request = std::move(req);
    cur->next.store(next, std::memory_order_release);
    detail::RecordCache::store(uid_, cur);

    for (unsigned spins = 0; cur->wait.load(std::memory_order_acquire); ++spins) {
      sched::point(sched::Site::CombinerWait);
      if (spins < 128) {
        detail::cpu_relax();
      } else {
        std::this_thread::yield();
      }
    }
    if (cur->completed.load(std::memory_order_acquire)) return std::move(cur->result);

    // Combiner role acquired.
    const auto active = active_combiners_.fetch_add(1, std::memory_order_acq_rel) + 1;
    if (active > stats_.max_active_combiners) stats_.max_active_combiners = active;
    if (active > 1) stats_.exclusion_violations++;

    Record* tmp = cur;
    std::size_t served = 0;
    Record* tmp_next = nullptr;
    while (served < batch_cap_ &&
           (tmp_next = tmp->next.load(std::memory_order_acquire)) != nullptr) {
      ++served;
      tmp->result = apply_(tmp->request);
      stats_.applies++;
      if (trace_enabled_) trace_.emplace_back(tmp->announce_lo, tmp->announce_hi);
      if (tmp != cur) {
        tmp->completed.store(true, std::memory_order_relaxed);
        tmp->wait.store(false, std::memory_order_release);
      }
      tmp = tmp_next;
    }
    Result mine = std::move(cur->result);
    stats_.batches++;
    stats_.batch_sizes[served]++;
    if (finalize_) {
      if (stats_.applies == last_finalized_applies_) stats_.finalize_order_violations++;
      finalize_();
    }
    last_finalized_applies_ = stats_.applies;
    stats_.finalizes++;
    active_combiners_.fetch_sub(1, std::memory_order_acq_rel);
    // Hand the role to the owner of tmp.
    tmp->wait.store(false, std::memory_order_release);
    return mine;
  }

  /// Snapshot of the counters (quiescent only).
  CombinerStats stats() const {
    CombinerStats s = stats_;
    s.announces = announces_.load(std::memory_order_relaxed);
    return s;
  }

  /// Records (lo, hi) announce stamps in apply order. Enable before use.
  void enable_trace() { trace_enabled_ = true; }
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& trace() const { return trace_; }

 private:
  struct Record {
    Request request{};
    Result result{};
    std::atomic<bool> wait{true};
    std::atomic<bool> completed{false};
    std::atomic<Record*> next{nullptr};
    std::uint64_t announce_lo = 0;
    std::uint64_t announce_hi = 0;
  };

  Record* allocate_record() {
    std::lock_guard g(pool_mu_);
    return &pool_.emplace_back();
  }

  Record* own_record() {
    if (void* r = detail::RecordCache::lookup(uid_)) return static_cast<Record*>(r);
    return allocate_record();
  }

  const std::uint64_t uid_;
  const std::size_t batch_cap_;
  ApplyFn apply_;
  FinalizeFn finalize_;
  alignas(64) std::atomic<Record*> tail_{nullptr};
  alignas(64) std::atomic<std::uint64_t> announces_{0};
  std::atomic<std::uint64_t> active_combiners_{0};
  std::mutex pool_mu_;
  std::deque<Record> pool_;

  CombinerStats stats_;
  std::uint64_t last_finalized_applies_ = 0;
  bool trace_enabled_ = false;
  std::atomic<std::uint64_t> trace_clock_{0};
  std::vector<std::pair<std::uint64_t, std::uint64_t>> trace_;
};

}  // namespace depq
