#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "depq/oracle.hpp"

using namespace depq;

namespace {

std::vector<UserKey> drain(LockedHeapPq& pq, const ItemArena& arena) {
  std::vector<UserKey> out;
  while (auto id = pq.extract_first()) {
    out.push_back(arena.node(*id).key.user_key);
    EXPECT_TRUE(pq.check_heap());
  }
  return out;
}

}  // namespace

TEST(SeqDepq, Basics) {
  SeqDepq s;
  for (UserKey k : {1, 2, 3}) s.insert(k);
  EXPECT_EQ(s.extract_min(), 1);
  SeqDepq empty;
  EXPECT_FALSE(empty.extract_max());
  EXPECT_EQ(seq_apply(s, Op{OpKind::ExtractMax, 0}), 3);
  EXPECT_FALSE(seq_apply(s, Op{OpKind::Insert, 9}));
  EXPECT_EQ(s.keys(), (std::vector<UserKey>{2, 9}));
}

TEST(SeqDepq, DuplicatesAreKept) {
  SeqDepq s;
  s.insert(5);
  s.insert(5);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.extract_max(), 5);
  EXPECT_EQ(s.extract_min(), 5);
  EXPECT_TRUE(s.empty());
}

TEST(SeqDepq, DeterministicReplay) {
  std::mt19937_64 rng(1);
  std::vector<Op> ops;
  for (int i = 0; i < 2000; ++i)
    ops.push_back(Op{static_cast<OpKind>(rng() % 3), static_cast<UserKey>(rng() % 20)});
  SeqDepq a;
  SeqDepq b;
  for (const Op& op : ops) ASSERT_EQ(seq_apply(a, op), seq_apply(b, op));
}

TEST(LockedHeap, AscendingExtract) {
  ItemArena arena;
  LockedHeapPq pq(arena, ListId::Min);
  for (UserKey k : {5, 1, 3}) pq.insert(arena.new_item(k));
  EXPECT_EQ(arena.node(*pq.extract_first()).key.user_key, 1);
}

TEST(LockedHeap, DescendingExtract) {
  ItemArena arena;
  LockedHeapPq pq(arena, ListId::Max);
  for (UserKey k : {5, 1, 3}) pq.insert(arena.new_item(k));
  EXPECT_EQ(arena.node(*pq.extract_first()).key.user_key, 5);
}

TEST(LockedHeap, DeleteByPosition) {
  ItemArena arena;
  LockedHeapPq pq(arena, ListId::Min);
  NodeId three = kNone;
  for (UserKey k : {5, 1, 3}) {
    const NodeId id = arena.new_item(k);
    if (k == 3) three = id;
    pq.insert(id);
  }
  EXPECT_TRUE(pq.erase(three));
  EXPECT_TRUE(pq.check_heap());
  EXPECT_EQ(drain(pq, arena), (std::vector<UserKey>{1, 5}));
}

TEST(LockedHeap, DeleteAbsentIsNoOp) {
  ItemArena arena;
  LockedHeapPq pq(arena, ListId::Max);
  const NodeId a = arena.new_item(1);
  pq.insert(a);
  ASSERT_TRUE(pq.extract_first());
  EXPECT_FALSE(pq.erase(a));
  EXPECT_FALSE(pq.erase(arena.new_item(2)));
  EXPECT_EQ(pq.size(), 0u);
}

TEST(LockedHeap, RandomOpsKeepHeapProperty) {
  std::mt19937_64 rng(9);
  for (ListId t : {ListId::Min, ListId::Max}) {
    ItemArena arena;
    LockedHeapPq pq(arena, t);
    std::vector<NodeId> live;
    std::vector<Key> model;
    for (int i = 0; i < 5000; ++i) {
      const auto r = rng() % 4;
      if (r < 2) {
        const NodeId id = arena.new_item(static_cast<UserKey>(rng() % 50));
        pq.insert(id);
        live.push_back(id);
        model.push_back(arena.node(id).key);
      } else if (r == 2 && !live.empty()) {
        const std::size_t at = rng() % live.size();
        ASSERT_TRUE(pq.erase(live[at]));
        model.erase(std::find(model.begin(), model.end(), arena.node(live[at]).key));
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
      } else {
        const auto got = pq.extract_first();
        if (model.empty()) {
          ASSERT_FALSE(got);
          continue;
        }
        const auto best = t == ListId::Min ? std::min_element(model.begin(), model.end())
                                           : std::max_element(model.begin(), model.end());
        ASSERT_TRUE(got);
        ASSERT_EQ(arena.node(*got).key, *best);
        model.erase(best);
        live.erase(std::find(live.begin(), live.end(), *got));
      }
      ASSERT_TRUE(pq.check_heap());
      ASSERT_EQ(pq.size(), model.size());
    }
  }
}
