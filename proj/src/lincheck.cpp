#include "depq/lincheck.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace depq::lincheck {

using ordered_json = nlohmann::ordered_json;

namespace {

OpKind parse_kind(const std::string& s) {
  if (s == "Insert") return OpKind::Insert;
  if (s == "ExtractMin") return OpKind::ExtractMin;
  if (s == "ExtractMax") return OpKind::ExtractMax;
  throw std::invalid_argument("unknown op kind: " + s);
}

Op to_op(const Event& e) { return Op{e.kind, e.arg.value_or(0)}; }

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Linearizable: return "LINEARIZABLE";
    case Verdict::NotLinearizable: return "NOT_LINEARIZABLE";
    case Verdict::BudgetExceeded: return "SEARCH_BUDGET_EXCEEDED";
  }
  return "?";
}

std::string validate(const History& h) {
  std::set<std::uint64_t> stamps;
  std::map<int, std::uint64_t> pending_at;  // thread -> invoke ts of its pending op
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Event& e = h[i];
    if (!stamps.insert(e.invoke).second) return "duplicate timestamp at event " + std::to_string(i);
    if (e.response) {
      if (*e.response <= e.invoke) return "response before invoke at event " + std::to_string(i);
      if (!stamps.insert(*e.response).second)
        return "duplicate timestamp at event " + std::to_string(i);
    }
    if (e.kind == OpKind::Insert && !e.arg) return "insert without arg at event " + std::to_string(i);
    if (e.pending() && e.result.tag != Outcome::Tag::Absent)
      return "pending event with a result at event " + std::to_string(i);
    if (!e.pending() && e.kind != OpKind::Insert && e.result.tag == Outcome::Tag::Absent)
      return "completed extract without a result at event " + std::to_string(i);
    if (e.pending()) {
      if (!pending_at.emplace(e.thread, e.invoke).second)
        return "thread " + std::to_string(e.thread) + " has two pending ops";
    }
  }
  // Per-thread ops must not overlap, and nothing follows a pending op.
  std::map<int, std::vector<const Event*>> by_thread;
  for (const Event& e : h) by_thread[e.thread].push_back(&e);
  for (auto& [t, evs] : by_thread) {
    std::sort(evs.begin(), evs.end(), [](auto* a, auto* b) { return a->invoke < b->invoke; });
    for (std::size_t i = 1; i < evs.size(); ++i) {
      if (evs[i - 1]->pending() || *evs[i - 1]->response > evs[i]->invoke)
        return "thread " + std::to_string(t) + " has overlapping ops";
    }
  }
  return {};
}

std::string to_json_line(const Event& e) {
  ordered_json j;
  j["thread"] = e.thread;
  j["kind"] = to_string(e.kind);
  j["arg"] = e.arg ? ordered_json(*e.arg) : ordered_json(nullptr);
  switch (e.result.tag) {
    case Outcome::Tag::Absent: j["result"] = nullptr; break;
    case Outcome::Tag::Empty: j["result"] = "NONE"; break;
    case Outcome::Tag::Value: j["result"] = e.result.value; break;
  }
  j["invoke"] = e.invoke;
  j["response"] = e.response ? ordered_json(*e.response) : ordered_json(nullptr);
  return j.dump();
}

Event from_json_line(const std::string& line) {
  const auto j = ordered_json::parse(line);
  Event e;
  e.thread = j.at("thread").get<int>();
  e.kind = parse_kind(j.at("kind").get<std::string>());
  if (!j.at("arg").is_null()) e.arg = j.at("arg").get<UserKey>();
  const auto& r = j.at("result");
  if (r.is_null()) {
    e.result = Outcome::absent();
  } else if (r.is_string()) {
    if (r.get<std::string>() != "NONE") throw std::invalid_argument("bad result: " + r.dump());
    e.result = Outcome::empty();
  } else {
    e.result = Outcome::of(r.get<UserKey>());
  }
  e.invoke = j.at("invoke").get<std::uint64_t>();
  if (!j.at("response").is_null()) e.response = j.at("response").get<std::uint64_t>();
  return e;
}

void write_jsonl(std::ostream& os, const History& h) {
  for (const Event& e : h) os << to_json_line(e) << '\n';
}

std::vector<History> read_jsonl(std::istream& is) {
  std::vector<History> out;
  History cur;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur.push_back(from_json_line(line));
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Recorder::Recorder(Depq& target, int threads) : target_(target), per_thread_(threads) {
  for (auto& v : per_thread_) v.reserve(64);
}

std::size_t Recorder::begin(int thread, OpKind kind, std::optional<UserKey> arg) {
  auto& log = per_thread_.at(thread);
  Event e;
  e.thread = thread;
  e.kind = kind;
  e.arg = arg;
  e.invoke = clock_.fetch_add(1, std::memory_order_acq_rel);
  log.push_back(e);
  return log.size() - 1;
}

void Recorder::end(int thread, std::size_t index, Outcome result) {
  Event& e = per_thread_.at(thread)[index];
  e.response = clock_.fetch_add(1, std::memory_order_acq_rel);
  e.result = result;
}

void Recorder::insert(int thread, UserKey k) {
  const auto i = begin(thread, OpKind::Insert, k);
  target_.insert(k);
  end(thread, i, Outcome::absent());
}

std::optional<UserKey> Recorder::extract_min(int thread) {
  const auto i = begin(thread, OpKind::ExtractMin, std::nullopt);
  const auto r = target_.extract_min();
  end(thread, i, Outcome::from(r));
  return r;
}

std::optional<UserKey> Recorder::extract_max(int thread) {
  const auto i = begin(thread, OpKind::ExtractMax, std::nullopt);
  const auto r = target_.extract_max();
  end(thread, i, Outcome::from(r));
  return r;
}

History Recorder::history() const {
  History h;
  for (const auto& log : per_thread_) h.insert(h.end(), log.begin(), log.end());
  std::sort(h.begin(), h.end(), [](const Event& a, const Event& b) { return a.invoke < b.invoke; });
  return h;
}

namespace {

class Search {
 public:
  Search(const History& h, const CheckOptions& opts) : h_(h), opts_(opts) {
    const std::size_t n = h.size();
    must_precede_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!h[i].pending()) completed_ |= bit(i);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && !h[j].pending() && *h[j].response < h[i].invoke) must_precede_[i] |= bit(j);
    }
  }

  CheckResult run() {
    CheckResult r;
    SeqDepq state;
    const bool found = dfs(0, state);
    r.states = states_;
    if (found) {
      r.verdict = Verdict::Linearizable;
      r.witness = path_;
    } else {
      r.verdict = budget_hit_ ? Verdict::BudgetExceeded : Verdict::NotLinearizable;
    }
    return r;
  }

 private:
  static std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

  std::string memo_key(std::uint64_t mask, const SeqDepq& s) const {
    std::string key(reinterpret_cast<const char*>(&mask), sizeof mask);
    for (UserKey k : s.keys()) key.append(reinterpret_cast<const char*>(&k), sizeof k);
    return key;
  }

  bool dfs(std::uint64_t mask, const SeqDepq& state) {
    if ((mask & completed_) == completed_) return true;
    if (++states_ > opts_.state_budget) {
      budget_hit_ = true;
      return false;
    }
    std::string key = memo_key(mask, state);
    if (failed_.contains(key)) return false;
    for (std::size_t i = 0; i < h_.size(); ++i) {
      if ((mask & bit(i)) != 0 || (must_precede_[i] & ~mask) != 0) continue;
      SeqDepq next = state;
      const auto result = seq_apply(next, to_op(h_[i]));
      if (!h_[i].pending() && !h_[i].result.matches(result)) continue;
      path_.push_back(i);
      if (dfs(mask | bit(i), next)) return true;
      path_.pop_back();
      if (budget_hit_) return false;
    }
    failed_.insert(std::move(key));
    return false;
  }

  const History& h_;
  const CheckOptions& opts_;
  std::vector<std::uint64_t> must_precede_;
  std::uint64_t completed_ = 0;
  std::uint64_t states_ = 0;
  bool budget_hit_ = false;
  std::unordered_set<std::string> failed_;
  std::vector<std::size_t> path_;
};

}  // namespace

CheckResult check(const History& h, const CheckOptions& opts) {
  if (const std::string err = validate(h); !err.empty())
    throw std::invalid_argument("malformed history: " + err);
  if (h.size() > 64) throw std::invalid_argument("history has more than 64 events");
  const auto completed =
      static_cast<std::size_t>(std::count_if(h.begin(), h.end(), [](const Event& e) { return !e.pending(); }));
  if (completed > opts.max_completed_ops)
    throw std::invalid_argument("history has " + std::to_string(completed) +
                                " completed ops; bound is " +
                                std::to_string(opts.max_completed_ops));
  return Search(h, opts).run();
}

bool witness_valid(const History& h, const std::vector<std::size_t>& witness) {
  std::vector<bool> seen(h.size(), false);
  SeqDepq state;
  for (std::size_t pos = 0; pos < witness.size(); ++pos) {
    const std::size_t i = witness[pos];
    if (i >= h.size() || seen[i]) return false;
    seen[i] = true;
    // Nothing placed later may have finished before i began.
    for (std::size_t later = pos + 1; later < witness.size(); ++later) {
      const Event& b = h[witness[later]];
      if (b.response && *b.response < h[i].invoke) return false;
    }
    const auto r = seq_apply(state, to_op(h[i]));
    if (!h[i].pending() && !h[i].result.matches(r)) return false;
  }
  for (std::size_t i = 0; i < h.size(); ++i)
    if (!h[i].pending() && !seen[i]) return false;
  return true;
}

}  // namespace depq::lincheck
