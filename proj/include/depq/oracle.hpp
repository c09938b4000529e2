#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "depq/item.hpp"
#include "depq/pq.hpp"

namespace depq {

enum class OpKind : std::uint8_t { Insert, ExtractMin, ExtractMax };

const char* to_string(OpKind k);

struct Op {
  OpKind kind = OpKind::Insert;
  UserKey arg = 0;  // Insert only
};

/// Sequential DEPQ: the semantics every concurrent implementation is held to.
/// Duplicate user keys are kept apart by an insertion counter, like the
/// concurrent structures do.
class SeqDepq {
 public:
  void insert(UserKey k) { contents_.insert(Key{k, next_uid_++}); }
  std::optional<UserKey> extract_min();
  std::optional<UserKey> extract_max();

  /// Applies one op; Insert yields nullopt.
  std::optional<UserKey> apply(const Op& op);

  bool empty() const { return contents_.empty(); }
  std::size_t size() const { return contents_.size(); }
  /// Sorted user keys.
  std::vector<UserKey> keys() const;

 private:
  std::set<Key> contents_;
  std::uint64_t next_uid_ = 0;
};

/// seq_apply(state, op) -> result, mutating state.
inline std::optional<UserKey> seq_apply(SeqDepq& state, const Op& op) { return state.apply(op); }

/// Binary heap of arena items behind one mutex, with a position index so that
/// arbitrary items can be deleted.
class LockedHeapPq final : public PriorityQueue {
 public:
  LockedHeapPq(const ItemArena& arena, ListId order) : arena_(arena), order_(order) {}

  ListId order() const override { return order_; }
  void insert(NodeId item) override;
  std::optional<NodeId> extract_first() override;
  bool has_delete() const override { return true; }
  bool erase(NodeId item) override;
  std::vector<NodeId> items() const override;
  std::size_t size() const override;

  /// Heap property and index consistency. Quiescent only.
  bool check_heap() const;

 private:
  bool first(NodeId a, NodeId b) const {
    return before(arena_.node(a).key, arena_.node(b).key, order_);
  }
  void place(std::size_t i, NodeId id) {
    heap_[i] = id;
    pos_[id] = i;
  }
  void sift_up(std::size_t i);
  void sift_down(std::size_t i);
  void remove_at(std::size_t i);

  const ItemArena& arena_;
  const ListId order_;
  mutable std::mutex mu_;
  std::vector<NodeId> heap_;
  std::unordered_map<NodeId, std::size_t> pos_;
};

}  // namespace depq
