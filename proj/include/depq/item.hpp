#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>

#include "depq/key.hpp"

namespace depq {

/// Stable handle of a node inside an ItemArena.
using NodeId = std::uint32_t;
inline constexpr NodeId kNone = 0xFFFFFFFFu;

/// (successor, mark) packed into one 64-bit word: successor in the high bits,
/// mark in bit 0. NONE is the reserved index kNone.
class LinkWord {
 public:
  constexpr LinkWord() = default;
  constexpr LinkWord(NodeId succ, bool mark)
      : raw_((static_cast<std::uint64_t>(succ) << 1) | (mark ? 1u : 0u)) {}

  static constexpr LinkWord from_raw(std::uint64_t raw) {
    LinkWord w;
    w.raw_ = raw;
    return w;
  }

  constexpr NodeId successor() const { return static_cast<NodeId>(raw_ >> 1); }
  constexpr bool marked() const { return (raw_ & 1u) != 0; }
  constexpr std::uint64_t raw() const { return raw_; }

  friend constexpr bool operator==(LinkWord, LinkWord) = default;

 private:
  std::uint64_t raw_ = static_cast<std::uint64_t>(kNone) << 1;
};

inline constexpr std::uint8_t kNotReserved = 0;

/// One element shared by both priority queues (or both lists).
///
/// `reserved` is a once-settable flag that holds the tag of the winning
/// reserver (1 + end index). `unlinked` counts physical removals and drives
/// the retire protocol. `deleted_mask` has bit t set once the node is
/// logically deleted in list t; it is read only by auditors.
struct Node {
  Key key{};
  std::atomic<std::uint8_t> reserved{kNotReserved};
  std::atomic<std::uint8_t> unlinked{0};
  std::atomic<std::uint8_t> deleted_mask{0};
  std::atomic<std::uint8_t> poisoned{0};
  std::array<std::atomic<std::uint64_t>, 2> link{};
  std::atomic<NodeId> free_next{kNone};

  Node() { reset_links(); }

  void reset_links() {
    for (auto& l : link) l.store(LinkWord{}.raw(), std::memory_order_relaxed);
  }

  LinkWord load_link(ListId t, std::memory_order mo = std::memory_order_acquire) const {
    return LinkWord::from_raw(link[index_of(t)].load(mo));
  }
  void store_link(ListId t, LinkWord w, std::memory_order mo = std::memory_order_release) {
    link[index_of(t)].store(w.raw(), mo);
  }
};

/// Atomic test-and-set of the reserved flag. Returns true iff this call
/// changed it from unreserved. `tag` (non-zero) records who won.
inline bool try_reserve(Node& n, std::uint8_t tag = 1) noexcept {
  std::uint8_t expected = kNotReserved;
  return n.reserved.compare_exchange_strong(expected, tag, std::memory_order_acq_rel,
                                            std::memory_order_acquire);
}

inline bool is_reserved(const Node& n) noexcept {
  return n.reserved.load(std::memory_order_acquire) != kNotReserved;
}

/// Tag stored by a reservation made from end t.
constexpr std::uint8_t reserve_tag(ListId t) noexcept {
  return static_cast<std::uint8_t>(1 + index_of(t));
}

/// Chunked node storage addressed by NodeId. Allocation is lock-free (bump
/// pointer plus a tagged Treiber free list); chunks are never returned to the
/// system before the arena is destroyed, so a NodeId always names readable
/// memory. Freed nodes are poisoned until reused.
class ItemArena {
 public:
  static constexpr unsigned kChunkBits = 10;
  static constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;
  static constexpr std::size_t kMaxChunks = 16384;
  static constexpr std::size_t kCapacity = kChunkSize * kMaxChunks;

  ItemArena();
  ~ItemArena();
  ItemArena(const ItemArena&) = delete;
  ItemArena& operator=(const ItemArena&) = delete;

  /// Fresh node with key (k, next uid), unreserved, both links (NONE, 0).
  NodeId new_item(UserKey k);

  /// Node that carries no user key, used as a list sentinel.
  NodeId new_sentinel();

  /// Returns a node to the free list and poisons it.
  void free(NodeId id);

  Node& node(NodeId id) {
    Node& n = slot(id);
    if (poison_checks_ && n.poisoned.load(std::memory_order_relaxed) != 0)
      poisoned_accesses_.fetch_add(1, std::memory_order_relaxed);
    return n;
  }
  const Node& node(NodeId id) const { return const_cast<ItemArena*>(this)->node(id); }

  void set_poison_checks(bool on) { poison_checks_ = on; }
  std::uint64_t poisoned_accesses() const {
    return poisoned_accesses_.load(std::memory_order_relaxed);
  }

  /// Number of slots ever handed out by the bump allocator.
  std::size_t high_water() const { return next_.load(std::memory_order_acquire); }
  std::uint64_t allocated() const { return allocated_.load(std::memory_order_relaxed); }
  std::uint64_t freed() const { return freed_.load(std::memory_order_relaxed); }
  std::uint64_t last_uid() const { return uid_.load(std::memory_order_relaxed); }

 private:
  Node& slot(NodeId id) const {
    Node* chunk = chunks_[id >> kChunkBits].load(std::memory_order_acquire);
    return chunk[id & (kChunkSize - 1)];
  }
  NodeId allocate();
  Node* ensure_chunk(std::size_t chunk);

  std::unique_ptr<std::atomic<Node*>[]> chunks_;
  std::atomic<std::size_t> next_{0};
  // (aba tag << 32) | head id
  std::atomic<std::uint64_t> free_head_;
  std::atomic<std::uint64_t> uid_{0};
  std::atomic<std::uint64_t> allocated_{0};
  std::atomic<std::uint64_t> freed_{0};
  std::atomic<std::uint64_t> poisoned_accesses_{0};
  bool poison_checks_ = false;
};

}  // namespace depq
