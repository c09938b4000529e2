#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "depq/lincheck.hpp"
#include "depq/list_depq.hpp"
#include "depq/sched.hpp"
#include "history_gen.hpp"
#include "naive_check.hpp"

using namespace depq;
using namespace depq::lincheck;

namespace {

Event ev(int thread, OpKind kind, std::optional<UserKey> arg, Outcome result, std::uint64_t inv,
         std::optional<std::uint64_t> resp) {
  Event e;
  e.thread = thread;
  e.kind = kind;
  e.arg = arg;
  e.result = result;
  e.invoke = inv;
  e.response = resp;
  return e;
}

Event ins(int t, UserKey k, std::uint64_t inv, std::uint64_t resp) {
  return ev(t, OpKind::Insert, k, Outcome::absent(), inv, resp);
}

Event xmin(int t, Outcome r, std::uint64_t inv, std::optional<std::uint64_t> resp) {
  return ev(t, OpKind::ExtractMin, std::nullopt, r, inv, resp);
}

Event xmax(int t, Outcome r, std::uint64_t inv, std::optional<std::uint64_t> resp) {
  return ev(t, OpKind::ExtractMax, std::nullopt, r, inv, resp);
}

}  // namespace

TEST(Recorder, SequentialTimestampsAlternate) {
  ListDepq d;
  Recorder rec(d, 1);
  rec.insert(0, 5);
  EXPECT_EQ(rec.extract_min(0), 5);
  const History h = rec.history();
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].invoke, 0u);
  EXPECT_EQ(h[0].response, 1u);
  EXPECT_EQ(h[1].invoke, 2u);
  EXPECT_EQ(h[1].response, 3u);
  EXPECT_EQ(h[1].result, Outcome::of(5));
  EXPECT_EQ(validate(h), "");
}

TEST(Recorder, OverlappingOpsInterleave) {
  ListDepq d;
  Recorder rec(d, 3);
  rec.insert(2, 1);
  sched::Scheduler s;
  const int a = s.spawn([&] { rec.insert(0, 9); });
  s.run_until(a, sched::Site::InsertBetweenQueues);
  EXPECT_EQ(rec.extract_max(1), 1);  // 9 is not yet in the Max list
  s.run_to_end(a);
  s.release_all();
  const History h = rec.history();
  ASSERT_EQ(h.size(), 3u);
  EXPECT_LT(h[1].invoke, h[2].invoke);
  EXPECT_LT(*h[2].response, *h[1].response);
  EXPECT_EQ(validate(h), "");
  EXPECT_EQ(check(h).verdict, Verdict::Linearizable);
}

TEST(Recorder, PendingOpKeepsAbsentResponse) {
  ListDepq d;
  Recorder rec(d, 2);
  rec.insert(0, 3);
  rec.begin(1, OpKind::ExtractMin, std::nullopt);
  const History h = rec.history();
  ASSERT_EQ(h.size(), 2u);
  EXPECT_TRUE(h[1].pending());
  EXPECT_EQ(h[1].result, Outcome::absent());
  EXPECT_EQ(validate(h), "");
  EXPECT_EQ(check(h).verdict, Verdict::Linearizable);
}

TEST(Check, SequentialHistoryWitnessIsRecordedOrder) {
  const History h{ins(0, 5, 0, 1), ins(0, 2, 2, 3), xmin(0, Outcome::of(2), 4, 5),
                  xmax(0, Outcome::of(5), 6, 7), xmin(0, Outcome::empty(), 8, 9)};
  const auto r = check(h);
  EXPECT_EQ(r.verdict, Verdict::Linearizable);
  EXPECT_EQ(r.witness, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_TRUE(witness_valid(h, r.witness));
}

TEST(Check, DualConsumerCounterexample) {
  // E1 takes 1 from the Min queue and stalls; E2 returns 2; E3 returns 1
  // after E2 has completed.
  const History h{ins(0, 1, 0, 1), ins(0, 2, 2, 3), xmin(1, Outcome::empty(), 4, 11),
                  xmin(2, Outcome::of(2), 5, 6), xmax(3, Outcome::of(1), 7, 8)};
  EXPECT_EQ(check(h).verdict, Verdict::NotLinearizable);
  EXPECT_FALSE(testkit::naive_linearizable(h));
  // With E1 still running the verdict is the same.
  History pending = h;
  pending[2].response.reset();
  pending[2].result = Outcome::absent();
  EXPECT_EQ(check(pending).verdict, Verdict::NotLinearizable);
}

TEST(Check, OverlappingExtractsOnTwoItems) {
  const History h{ins(0, 1, 0, 1), ins(0, 2, 2, 3), xmin(1, Outcome::of(1), 4, 7),
                  xmax(2, Outcome::of(2), 5, 6)};
  const auto r = check(h);
  EXPECT_EQ(r.verdict, Verdict::Linearizable);
  EXPECT_TRUE(witness_valid(h, r.witness));
}

TEST(Check, RealTimeOrderIsRespected) {
  // The extract finished before the insert started, so it cannot see 4.
  const History h{xmin(1, Outcome::of(4), 0, 1), ins(0, 4, 2, 3)};
  EXPECT_EQ(check(h).verdict, Verdict::NotLinearizable);
  const History ok{xmin(1, Outcome::of(4), 0, 3), ins(0, 4, 1, 2)};
  EXPECT_EQ(check(ok).verdict, Verdict::Linearizable);
}

TEST(Check, BudgetExceededIsDistinct) {
  std::mt19937_64 rng(2);
  const History h = testkit::generate_history(rng, 12, 4, false);
  CheckOptions tiny;
  tiny.state_budget = 1;
  EXPECT_EQ(check(h, tiny).verdict, Verdict::BudgetExceeded);
}

TEST(Check, RejectsMalformedAndOversized) {
  EXPECT_THROW(check(History{ins(0, 1, 1, 0)}), std::invalid_argument);
  EXPECT_THROW(check(History{ins(0, 1, 0, 1), ins(1, 2, 1, 2)}), std::invalid_argument);
  EXPECT_THROW(check(History{ins(0, 1, 0, 3), ins(0, 2, 1, 2)}), std::invalid_argument);
  History big;
  for (std::uint64_t i = 0; i < 21; ++i) big.push_back(ins(0, 1, 2 * i, 2 * i + 1));
  EXPECT_THROW(check(big), std::invalid_argument);
  CheckOptions wide;
  wide.max_completed_ops = 21;
  EXPECT_EQ(check(big, wide).verdict, Verdict::Linearizable);
}

TEST(Json, LineFormat) {
  EXPECT_EQ(to_json_line(xmin(2, Outcome::empty(), 4, 9)),
            R"({"thread":2,"kind":"ExtractMin","arg":null,"result":"NONE","invoke":4,"response":9})");
  EXPECT_EQ(to_json_line(ins(0, -3, 0, 1)),
            R"({"thread":0,"kind":"Insert","arg":-3,"result":null,"invoke":0,"response":1})");
  EXPECT_EQ(to_json_line(xmax(1, Outcome::absent(), 5, std::nullopt)),
            R"({"thread":1,"kind":"ExtractMax","arg":null,"result":null,"invoke":5,"response":null})");
}

TEST(Json, RoundTripProperty) {
  std::mt19937_64 rng(77);
  std::vector<History> all;
  for (int i = 0; i < 300; ++i) all.push_back(testkit::generate_history(rng, 1 + i % 10, 3, true));
  std::stringstream ss;
  for (const auto& h : all) {
    write_jsonl(ss, h);
    ss << '\n';
  }
  const auto back = read_jsonl(ss);
  ASSERT_EQ(back.size(), all.size());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(back[i], all[i]) << "history " << i;
}

TEST(Json, RejectsUnknownKind) {
  EXPECT_THROW(from_json_line(
                   R"({"thread":0,"kind":"Peek","arg":null,"result":null,"invoke":0,"response":1})"),
               std::invalid_argument);
}

TEST(Check, AgreesWithNaiveEnumerator) {
  std::mt19937_64 rng(1234);
  int positives = 0;
  int negatives = 0;
  for (int i = 0; i < 3000; ++i) {
    History h = testkit::generate_history(rng, 1 + static_cast<int>(rng() % 10),
                                          1 + static_cast<int>(rng() % 4), rng() % 3 == 0);
    if (i % 2 == 1 && !testkit::mutate(rng, h)) continue;
    const bool naive = testkit::naive_linearizable(h);
    const auto r = check(h);
    ASSERT_NE(r.verdict, Verdict::BudgetExceeded);
    ASSERT_EQ(r.verdict == Verdict::Linearizable, naive) << "history " << i;
    if (naive) {
      ASSERT_TRUE(witness_valid(h, r.witness));
      ++positives;
    } else {
      ++negatives;
    }
  }
  EXPECT_GT(positives, 1000);
  EXPECT_GT(negatives, 300);
}
