#pragma once

#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "depq/ccsynch.hpp"
#include "depq/depq.hpp"
#include "depq/item.hpp"
#include "depq/ordered_list.hpp"
#include "depq/pq.hpp"

namespace depq {

/// Single-consumer priority queue on one ordered list: extract_first deletes
/// the first live node and returns it without touching its reservation, then
/// advances the head.
class ListPq final : public PriorityQueue {
 public:
  ListPq(ItemArena& arena, ListId order);

  ListId order() const override { return list_.id(); }
  void insert(NodeId item) override { list_.insert(item); }
  std::optional<NodeId> extract_first() override;
  std::vector<NodeId> items() const override { return list_.live_suffix(); }

  const OrderedList& list() const { return list_; }

 private:
  ItemArena& arena_;
  OrderedList list_;
};

/// Generic dual-consumer DEPQ over two single-consumer priority queues.
///
/// Insert puts one item into the Min queue, then the Max queue. An extract
/// pulls from its own queue until it wins the item's reservation; a lost
/// reservation means the other end already returned that item.
///
/// At most one thread may run extract_min and at most one extract_max at any
/// time. Use MultiConsumerDepq to lift that restriction.
class DualDepq final : public Depq {
 public:
  DualDepq(std::shared_ptr<ItemArena> arena, std::unique_ptr<PriorityQueue> min_pq,
           std::unique_ptr<PriorityQueue> max_pq, bool use_optional_delete = false);

  void insert(UserKey k) override;
  std::optional<UserKey> extract_min() override { return extract(ListId::Min); }
  std::optional<UserKey> extract_max() override { return extract(ListId::Max); }
  std::optional<UserKey> extract(ListId t);

  std::vector<UserKey> quiescent_contents() const override;
  std::string audit() const override;
  DepqStats stats() const override;
  std::string name() const override { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  bool optional_delete_active() const { return optional_delete_; }
  PriorityQueue& queue(ListId t) { return *queues_[index_of(t)]; }
  const PriorityQueue& queue(ListId t) const { return *queues_[index_of(t)]; }
  ItemArena& arena() { return *arena_; }

  /// Reservations lost at end t to something other than a completed
  /// reservation from the opposite end. Must stay 0.
  std::uint64_t transfer_violations() const {
    return transfer_violations_.load(std::memory_order_relaxed);
  }

 private:
  std::shared_ptr<ItemArena> arena_;
  std::array<std::unique_ptr<PriorityQueue>, 2> queues_;
  bool optional_delete_;
  std::string name_ = "dual";
  std::array<std::atomic<std::uint64_t>, 2> failed_reserve_{};
  std::array<std::atomic<std::uint64_t>, 2> successes_{};
  std::atomic<std::uint64_t> transfer_violations_{0};
};

/// Dual DEPQ over two LockedHeapPq instances.
std::unique_ptr<DualDepq> make_dual_heap(bool use_optional_delete = false);
/// Dual DEPQ over two ListPq instances sharing one arena.
std::unique_ptr<DualDepq> make_dual_list();

enum class MultiConsumerMode : std::uint8_t { TwoLocks, Combining };

const char* to_string(MultiConsumerMode m);

/// Lifts a dual-consumer DEPQ to any number of extractors per end: each end
/// is guarded either by a mutex or by a combiner that runs the dual extract
/// for every request in its batch. Inserts bypass both.
class MultiConsumerDepq final : public Depq {
 public:
  MultiConsumerDepq(std::unique_ptr<DualDepq> inner, MultiConsumerMode mode,
                    std::size_t batch_cap = Combiner<int, int>::kDefaultBatchCap);

  void insert(UserKey k) override { inner_->insert(k); }
  std::optional<UserKey> extract_min() override { return extract(ListId::Min); }
  std::optional<UserKey> extract_max() override { return extract(ListId::Max); }
  std::optional<UserKey> extract(ListId t);

  std::vector<UserKey> quiescent_contents() const override { return inner_->quiescent_contents(); }
  std::string audit() const override { return inner_->audit(); }
  DepqStats stats() const override;
  std::string name() const override;

  MultiConsumerMode mode() const { return mode_; }
  DualDepq& inner() { return *inner_; }
  CombinerStats combiner_stats(ListId t) const;

 private:
  struct Unit {};
  std::unique_ptr<DualDepq> inner_;
  MultiConsumerMode mode_;
  std::array<std::mutex, 2> locks_;
  std::array<std::unique_ptr<Combiner<Unit, std::optional<UserKey>>>, 2> combiners_;
};

std::unique_ptr<MultiConsumerDepq> make_multi_consumer(std::unique_ptr<DualDepq> d,
                                                       MultiConsumerMode mode,
                                                       std::size_t batch_cap = 64);

}  // namespace depq
