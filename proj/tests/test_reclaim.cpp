#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "depq/list_depq.hpp"
#include "depq/reclaim.hpp"
#include "depq/sched.hpp"

using namespace depq;

TEST(Reclaim, SecondUnlinkRetires) {
  ItemArena arena;
  Reclaimer r(arena, ReclaimMode::Deferred);
  const NodeId n = arena.new_item(1);
  EXPECT_FALSE(r.on_unlink(n));
  EXPECT_TRUE(r.on_unlink(n));
  EXPECT_EQ(r.protocol_violations(), 0u);
}

TEST(Reclaim, ThirdUnlinkIsAViolation) {
  ItemArena arena;
  Reclaimer r(arena, ReclaimMode::Deferred);
  const NodeId n = arena.new_item(1);
  r.on_unlink(n);
  r.on_unlink(n);
  EXPECT_FALSE(r.on_unlink(n));
  EXPECT_EQ(r.protocol_violations(), 1u);
}

TEST(Reclaim, EpochFreesAfterTwoAdvances) {
  ItemArena arena;
  Reclaimer r(arena, ReclaimMode::Epoch);
  const NodeId n = arena.new_item(1);
  {
    auto g = r.enter();
    r.unlink_and_maybe_retire(n);
    r.unlink_and_maybe_retire(n);
  }
  EXPECT_EQ(r.retired(), 1u);
  EXPECT_TRUE(r.try_advance());
  EXPECT_EQ(r.deallocated(), 0u);
  EXPECT_TRUE(r.try_advance());
  EXPECT_EQ(r.deallocated(), 1u);
  EXPECT_EQ(arena.freed(), 1u);
  EXPECT_EQ(r.pending(), 0u);
}

TEST(Reclaim, FrozenReaderBlocksDeallocation) {
  ItemArena arena;
  Reclaimer r(arena, ReclaimMode::Epoch);
  std::atomic<bool> inside{false};
  std::atomic<bool> leave{false};
  std::thread reader([&] {
    auto g = r.enter();
    inside = true;
    while (!leave) std::this_thread::yield();
  });
  while (!inside) std::this_thread::yield();
  const NodeId n = arena.new_item(1);
  r.retire(n);
  for (int i = 0; i < 10; ++i) r.try_advance();
  EXPECT_EQ(r.deallocated(), 0u);
  EXPECT_LE(r.epoch(), 1u);
  leave = true;
  reader.join();
  for (int i = 0; i < 3; ++i) r.try_advance();
  EXPECT_EQ(r.deallocated(), 1u);
}

TEST(Reclaim, DeferredNeverDeallocates) {
  ItemArena arena;
  Reclaimer r(arena, ReclaimMode::Deferred);
  for (int i = 0; i < 10; ++i) r.retire(arena.new_item(i));
  for (int i = 0; i < 10; ++i) EXPECT_FALSE(r.try_advance());
  EXPECT_EQ(r.deallocated(), 0u);
  EXPECT_EQ(r.pending(), 10u);
  EXPECT_EQ(arena.freed(), 0u);
}

// Every node that leaves both lists sees exactly two unlinks and one
// retirement, in either reclamation mode.
TEST(Reclaim, ListDepqRetiresEachRemovedNodeOnce) {
  for (ReclaimMode mode : {ReclaimMode::Deferred, ReclaimMode::Epoch}) {
    ListDepq d(ListDepqOptions{.batch_cap = 4, .reclaim = mode});
    std::vector<std::thread> ts;
    for (int p = 0; p < 2; ++p)
      ts.emplace_back([&, p] {
        for (int i = 0; i < 3000; ++i) d.insert(p * 3000 + i);
      });
    for (int c = 0; c < 4; ++c)
      ts.emplace_back([&, c] {
        for (int i = 0; i < 3000; ++i) c % 2 ? d.extract_max() : d.extract_min();
      });
    for (auto& t : ts) t.join();
    while (d.extract_min() || d.extract_max()) {
    }
    const auto& rc = d.reclaimer();
    if (mode == ReclaimMode::Deferred) {
      std::uint64_t once = 0;
      std::uint64_t twice = 0;
      for (NodeId id = 0; id < d.arena().high_water(); ++id) {
        const auto u = d.arena().node(id).unlinked.load();
        ASSERT_LE(u, 2u);
        if (u == 1) ++once;
        if (u == 2) ++twice;
      }
      EXPECT_EQ(twice, rc.retired());
      EXPECT_EQ(rc.unlink_calls(), once + 2 * twice);
    }
    EXPECT_EQ(rc.protocol_violations(), 0u);
    EXPECT_GT(rc.retired(), 5000u);
    EXPECT_EQ(d.audit(), "");
    if (mode == ReclaimMode::Epoch) {
      EXPECT_GT(rc.deallocated(), 0u);
      EXPECT_EQ(d.arena().poisoned_accesses(), 0u);
    }
  }
}
