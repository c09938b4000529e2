#include <algorithm>
#include <map>
#include <sstream>

#include "depq/harness.hpp"
#include "depq/list_depq.hpp"
#include "depq/oracle.hpp"
#include "depq/sched.hpp"

namespace depq::harness {

namespace {

using sched::Scheduler;
using sched::ScheduleError;
using sched::Site;

std::string render(const std::optional<UserKey>& r) { return r ? std::to_string(*r) : "NONE"; }

std::string render_dump(const std::vector<std::pair<UserKey, bool>>& d) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < d.size(); ++i)
    os << (i ? " " : "") << d[i].first << (d[i].second ? "*" : "");
  os << ']';
  return os.str();
}

// Two extract_min consumers on a dual-consumer DEPQ, which breaks its
// contract: E1 pulls 1 and stalls, E2 returns 2, E3 (an extract_max) skips 2
// and returns 1.
ReplayResult replay_counterexample() {
  ReplayResult r;
  r.name = "counterexample";
  auto d = make_dual_heap();
  lincheck::Recorder rec(*d, 4);
  rec.insert(0, 1);
  rec.insert(0, 2);

  Scheduler s;
  std::optional<UserKey> e1;
  std::optional<UserKey> e2;
  std::optional<UserKey> e3;
  const int a = s.spawn([&] { e1 = rec.extract_min(1); });
  const int b = s.spawn([&] { e2 = rec.extract_min(2); });
  const int c = s.spawn([&] { e3 = rec.extract_max(3); });
  s.run_until(a, Site::AfterQueueExtract);
  s.run_to_end(b);
  s.run_to_end(c);
  s.run_to_end(a);
  s.release_all();

  if (e2 != std::optional<UserKey>{2} || e3 != std::optional<UserKey>{1})
    throw ScheduleError("counterexample schedule produced E2=" + render(e2) + " E3=" + render(e3));

  const auto h = rec.history();
  const auto res = lincheck::check(h);
  r.verdict = lincheck::to_string(res.verdict);
  r.lines.push_back("E1 extract_min -> " + render(e1) + " (stalled after removing 1)");
  r.lines.push_back("E2 extract_min -> " + render(e2));
  r.lines.push_back("E3 extract_max -> " + render(e3) + " (skipped reserved 2)");
  r.lines.push_back("history:");
  for (const auto& e : h) r.lines.push_back("  " + lincheck::to_json_line(e));
  r.lines.push_back("verdict: " + r.verdict);
  r.passed = res.verdict == lincheck::Verdict::NotLinearizable;
  return r;
}

// Keys 1,2,5 with 1 deleted from the Min list and 5 from the Max list. Then
// inserts of 3 and 4 race with an extract_max so that 4 lands in the Max
// list after the freshly deleted 3.
ReplayResult replay_twist() {
  ReplayResult r;
  r.name = "twist";
  ListDepq d;
  for (UserKey k : {1, 2, 5}) d.insert(k);
  if (d.extract_min() != std::optional<UserKey>{1} || d.extract_max() != std::optional<UserKey>{5})
    throw ScheduleError("twist setup did not delete 1 and 5");
  r.lines.push_back("(a) min " + render_dump(d.dump(ListId::Min)) + "  max " +
                    render_dump(d.dump(ListId::Max)));

  Scheduler s;
  std::optional<UserKey> c_result;
  const int a = s.spawn([&] { d.insert(3); });
  const int b = s.spawn([&] { d.insert(4); });
  const int c = s.spawn([&] { c_result = d.extract_max(); });
  s.run_until(a, Site::InsertBetweenQueues);  // 3 in the Min list
  s.run_until(b, Site::InsertBetweenQueues);  // 4 in the Min list
  s.run_to_end(a);                            // 3 in the Max list
  s.run_until(b, Site::InsertBeforeCas);      // 4 aims between 5 and 3
  s.run_to_end(c);                            // deletes 3 from the Max list
  r.lines.push_back("(b) min " + render_dump(d.dump(ListId::Min)) + "  max " +
                    render_dump(d.dump(ListId::Max)));
  s.run_to_end(b);                            // CAS fails, 4 goes after 3
  s.release_all();
  if (c_result != std::optional<UserKey>{3})
    throw ScheduleError("twist extract_max returned " + render(c_result));

  const auto min_dump = d.dump(ListId::Min);
  const auto max_dump = d.dump(ListId::Max);
  r.lines.push_back("(c) min " + render_dump(min_dump) + "  max " + render_dump(max_dump));

  // Keys present in both lists whose relative order agrees in both.
  std::map<UserKey, std::size_t> pos_min;
  for (std::size_t i = 0; i < min_dump.size(); ++i) pos_min[min_dump[i].first] = i;
  std::vector<std::pair<UserKey, UserKey>> same_order;
  for (std::size_t i = 0; i < max_dump.size(); ++i)
    for (std::size_t j = i + 1; j < max_dump.size(); ++j) {
      const auto pi = pos_min.find(max_dump[i].first);
      const auto pj = pos_min.find(max_dump[j].first);
      if (pi != pos_min.end() && pj != pos_min.end() && pi->second < pj->second)
        same_order.emplace_back(max_dump[i].first, max_dump[j].first);
    }
  for (const auto& [x, y] : same_order)
    r.lines.push_back("not opposite: " + std::to_string(x) + " precedes " + std::to_string(y) +
                      " in both lists");
  const std::string audit = d.audit();
  r.lines.push_back(audit.empty() ? "audit: pass" : "audit: FAIL " + audit);

  // The linearized order: the racing extract_max lands before the insert of 4
  // completes in the Max list.
  SeqDepq oracle;
  for (UserKey k : {1, 2, 5}) oracle.insert(k);
  oracle.extract_min();
  oracle.extract_max();
  oracle.insert(3);
  oracle.extract_max();
  oracle.insert(4);
  bool drain_ok = true;
  for (int i = 0; i < 3; ++i) {
    const bool from_max = i % 2 == 0;
    const auto got = from_max ? d.extract_max() : d.extract_min();
    const auto want = from_max ? oracle.extract_max() : oracle.extract_min();
    r.lines.push_back(std::string(from_max ? "extract_max" : "extract_min") + " -> " +
                      render(got) + " (expected " + render(want) + ")");
    drain_ok = drain_ok && got == want;
  }
  drain_ok = drain_ok && !d.extract_min() && !d.extract_max();
  r.passed = !same_order.empty() && audit.empty() && drain_ok;
  r.verdict = r.passed ? "TWIST_REPRODUCED" : "TWIST_FAILED";
  return r;
}

// One item; extract_min and extract_max race under every two-thread ordering
// of interest. The reservation must hand the item to exactly one of them.
ReplayResult replay_single_item_race() {
  ReplayResult r;
  r.name = "single-item-race";
  bool all_ok = true;
  struct Plan {
    const char* label;
    bool list;
    bool min_first;
    std::optional<Site> pause;
  };
  const Plan plans[] = {
      {"list: min then max", true, true, std::nullopt},
      {"list: max then min", true, false, std::nullopt},
      {"list: min paused after mark, max runs", true, true, Site::AfterMark},
      {"list: max paused after mark, min runs", true, false, Site::AfterMark},
      {"dual: min paused after queue extract, max runs", false, true, Site::AfterQueueExtract},
      {"dual: max paused after queue extract, min runs", false, false, Site::AfterQueueExtract},
  };
  for (const Plan& p : plans) {
    std::unique_ptr<Depq> d;
    if (p.list) {
      d = std::make_unique<ListDepq>();
    } else {
      d = make_dual_heap();
    }
    d->insert(7);
    Scheduler s;
    std::optional<UserKey> got_min;
    std::optional<UserKey> got_max;
    const int tmin = s.spawn([&] { got_min = d->extract_min(); });
    const int tmax = s.spawn([&] { got_max = d->extract_max(); });
    const int first = p.min_first ? tmin : tmax;
    const int second = p.min_first ? tmax : tmin;
    if (p.pause) s.run_until(first, *p.pause);
    else s.run_to_end(first);
    s.run_to_end(second);
    s.run_to_end(first);
    s.release_all();
    const bool ok = (got_min.has_value() != got_max.has_value()) &&
                    (got_min.value_or(7) == 7) && (got_max.value_or(7) == 7);
    all_ok = all_ok && ok;
    r.lines.push_back(std::string(p.label) + ": min=" + render(got_min) + " max=" + render(got_max) +
                      (ok ? "  ok" : "  WRONG"));
  }
  r.passed = all_ok;
  r.verdict = all_ok ? "EXCLUSIVE" : "NOT_EXCLUSIVE";
  return r;
}

}  // namespace

std::vector<std::string> replay_names() { return {"counterexample", "twist", "single-item-race"}; }

ReplayResult replay(const std::string& name) {
  if (name == "counterexample") return replay_counterexample();
  if (name == "twist") return replay_twist();
  if (name == "single-item-race") return replay_single_item_race();
  throw std::invalid_argument("unknown replay scenario: " + name);
}

}  // namespace depq::harness
