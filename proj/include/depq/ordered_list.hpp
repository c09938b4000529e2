#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depq/item.hpp"
#include "depq/key.hpp"

namespace depq {

/// Result of auditing one list. Each claim is evaluated independently.
struct ListAudit {
  bool finite = true;              // links from head form a finite list
  bool deleted_prefix = true;      // logically deleted nodes form a prefix
  bool suffix_sorted = true;       // live suffix strictly ordered by before(.,.,t)
  bool last_deleted_position = true;
  bool heads_deleted = true;       // head and last_deleted name deleted nodes
  bool used_second_last_branch = false;
  std::size_t prefix_length = 0;
  std::size_t suffix_length = 0;
  std::string diagnostic;

  bool ok() const {
    return finite && deleted_prefix && suffix_sorted && last_deleted_position && heads_deleted;
  }
};

/// A sorted singly-linked list threaded through link[t] of arena nodes.
///
/// Nodes before (and including) last_deleted are logically deleted; the
/// mark bit on a link means "the node this points to is deleted". Insert is
/// lock-free and may run from any number of threads. extract, update_head and
/// every write to last_deleted require a single caller at a time (the caller
/// supplies that exclusion, normally through a combiner).
class OrderedList {
 public:
  /// `sentinel` must be a fresh node whose link[t] is (NONE, 0). Several lists
  /// over different ListIds may share the same sentinel.
  OrderedList(ItemArena& arena, ListId t, NodeId sentinel);

  ListId id() const { return type_; }

  void insert(NodeId node);

  /// Fetch-or of the mark bit on node's link[t]; returns the prior word.
  LinkWord fao_mark(NodeId node);

  /// Logically deletes the first live node. With `reserving`, keeps going
  /// until it wins the node's reservation (tag `reserve_tag(t)`); otherwise
  /// returns the first node it deletes. nullopt when the list is empty.
  std::optional<NodeId> extract(bool reserving);

  /// Advances head to last_deleted. Returns the physically removed nodes.
  std::vector<NodeId> update_head();

  /// Quiescent or frozen-world only.
  ListAudit audit() const;

  /// Node ids reachable from head, in link order (quiescent only).
  std::vector<NodeId> traverse() const;
  /// Nodes after the deleted prefix (quiescent only).
  std::vector<NodeId> live_suffix() const;

  NodeId head() const { return head_.load(std::memory_order_acquire); }
  NodeId last_deleted() const { return last_deleted_.load(std::memory_order_acquire); }
  bool extract_between_mark_and_write() const {
    return mark_pending_.load(std::memory_order_acquire);
  }

  std::uint64_t failed_insert_cas() const { return failed_cas_.load(std::memory_order_relaxed); }
  std::uint64_t failed_reserve() const { return failed_reserve_.load(std::memory_order_relaxed); }
  std::uint64_t update_head_calls() const { return update_head_calls_.load(std::memory_order_relaxed); }
  /// Removed nodes that were never marked deleted in this list. Must stay 0.
  std::uint64_t unmarked_removals() const { return unmarked_removals_.load(std::memory_order_relaxed); }

 private:
  ItemArena& arena_;
  ListId type_;
  std::atomic<NodeId> head_;
  std::atomic<NodeId> last_deleted_;
  std::atomic<bool> mark_pending_{false};
  std::atomic<std::uint64_t> failed_cas_{0};
  std::atomic<std::uint64_t> failed_reserve_{0};
  std::atomic<std::uint64_t> update_head_calls_{0};
  std::atomic<std::uint64_t> unmarked_removals_{0};
};

}  // namespace depq
