#pragma once

#include <array>
#include <atomic>
#include <memory>
#include <optional>

#include "depq/ccsynch.hpp"
#include "depq/depq.hpp"
#include "depq/item.hpp"
#include "depq/ordered_list.hpp"
#include "depq/reclaim.hpp"

namespace depq {

struct ListDepqOptions {
  std::size_t batch_cap = 64;
  ReclaimMode reclaim = ReclaimMode::Deferred;
  /// Fault injection for mutation tests: extractions skip the reservation,
  /// so one key can be returned from both ends.
  bool skip_reservation = false;
  bool trace_combiners = false;
};

/// Multi-consumer DEPQ made of two sorted lists that share nodes. Each end is
/// served by its own combiner: requests run the single-consumer extract of
/// that end's list, and each batch ends with one head update whose removed
/// nodes go through the retire protocol.
class ListDepq final : public Depq {
 public:
  explicit ListDepq(ListDepqOptions opts = {});
  ~ListDepq() override;

  void insert(UserKey k) override;
  std::optional<UserKey> extract_min() override { return extract(ListId::Min); }
  std::optional<UserKey> extract_max() override { return extract(ListId::Max); }
  std::optional<UserKey> extract(ListId t);

  std::vector<UserKey> quiescent_contents() const override;
  std::string audit() const override;
  DepqStats stats() const override;
  std::string name() const override { return "list-depq"; }

  const OrderedList& list(ListId t) const { return *lists_[index_of(t)]; }
  OrderedList& list(ListId t) { return *lists_[index_of(t)]; }
  ItemArena& arena() { return arena_; }
  const ItemArena& arena() const { return arena_; }
  Reclaimer& reclaimer() { return reclaimer_; }
  const Reclaimer& reclaimer() const { return reclaimer_; }
  NodeId sentinel() const { return sentinel_; }
  CombinerStats combiner_stats(ListId t) const { return combiners_[index_of(t)]->stats(); }
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& combiner_trace(ListId t) const {
    return combiners_[index_of(t)]->trace();
  }

  /// (user key, logically deleted in t) in link order from head, sentinel
  /// omitted. Quiescent only.
  std::vector<std::pair<UserKey, bool>> dump(ListId t) const;

 private:
  struct Unit {};
  std::optional<UserKey> serve(ListId t);
  void finish_batch(ListId t);

  ListDepqOptions opts_;
  ItemArena arena_;
  Reclaimer reclaimer_;
  NodeId sentinel_;
  std::array<std::unique_ptr<OrderedList>, 2> lists_;
  std::array<std::unique_ptr<Combiner<Unit, std::optional<UserKey>>>, 2> combiners_;
  std::array<std::atomic<std::uint64_t>, 2> successes_{};
};

}  // namespace depq
