#include "depq/item.hpp"

#include <limits>
#include <stdexcept>

namespace depq {

namespace {
constexpr std::uint64_t pack_free(std::uint32_t tag, NodeId id) {
  return (static_cast<std::uint64_t>(tag) << 32) | id;
}
}  // namespace

ItemArena::ItemArena()
    : chunks_(new std::atomic<Node*>[kMaxChunks]), free_head_(pack_free(0, kNone)) {
  for (std::size_t i = 0; i < kMaxChunks; ++i) chunks_[i].store(nullptr, std::memory_order_relaxed);
}

ItemArena::~ItemArena() {
  for (std::size_t i = 0; i < kMaxChunks; ++i) delete[] chunks_[i].load(std::memory_order_relaxed);
}

Node* ItemArena::ensure_chunk(std::size_t chunk) {
  Node* existing = chunks_[chunk].load(std::memory_order_acquire);
  if (existing != nullptr) return existing;
  auto* fresh = new Node[kChunkSize];
  if (chunks_[chunk].compare_exchange_strong(existing, fresh, std::memory_order_acq_rel)) return fresh;
  delete[] fresh;
  return existing;
}

NodeId ItemArena::allocate() {
  std::uint64_t head = free_head_.load(std::memory_order_acquire);
  while (static_cast<NodeId>(head) != kNone) {
    const NodeId id = static_cast<NodeId>(head);
    const NodeId next = slot(id).free_next.load(std::memory_order_relaxed);
    const auto tag = static_cast<std::uint32_t>(head >> 32) + 1;
    if (free_head_.compare_exchange_weak(head, pack_free(tag, next), std::memory_order_acq_rel,
                                         std::memory_order_acquire)) {
      Node& n = slot(id);
      n.poisoned.store(0, std::memory_order_relaxed);
      return id;
    }
  }
  const std::size_t idx = next_.fetch_add(1, std::memory_order_acq_rel);
  if (idx >= kCapacity || idx >= kNone) {
    next_.fetch_sub(1, std::memory_order_relaxed);
    throw std::length_error("ItemArena: node capacity exhausted");
  }
  ensure_chunk(idx >> kChunkBits);
  return static_cast<NodeId>(idx);
}

NodeId ItemArena::new_item(UserKey k) {
  const std::uint64_t uid = uid_.fetch_add(1, std::memory_order_relaxed);
  if (uid == std::numeric_limits<std::uint64_t>::max())
    throw std::overflow_error("ItemArena: uid counter exhausted");
  const NodeId id = allocate();
  Node& n = slot(id);
  n.key = Key{k, uid};
  n.reserved.store(kNotReserved, std::memory_order_relaxed);
  n.unlinked.store(0, std::memory_order_relaxed);
  n.deleted_mask.store(0, std::memory_order_relaxed);
  n.reset_links();
  allocated_.fetch_add(1, std::memory_order_relaxed);
  return id;
}

NodeId ItemArena::new_sentinel() {
  const NodeId id = allocate();
  Node& n = slot(id);
  n.key = Key{std::numeric_limits<UserKey>::min(), std::numeric_limits<std::uint64_t>::max()};
  n.reserved.store(kNotReserved, std::memory_order_relaxed);
  n.unlinked.store(0, std::memory_order_relaxed);
  n.deleted_mask.store(0b11, std::memory_order_relaxed);
  n.reset_links();
  allocated_.fetch_add(1, std::memory_order_relaxed);
  return id;
}

void ItemArena::free(NodeId id) {
  Node& n = slot(id);
  n.poisoned.store(1, std::memory_order_relaxed);
  n.key = Key{std::numeric_limits<UserKey>::min(), 0};
  freed_.fetch_add(1, std::memory_order_relaxed);
  std::uint64_t head = free_head_.load(std::memory_order_acquire);
  for (;;) {
    n.free_next.store(static_cast<NodeId>(head), std::memory_order_relaxed);
    const auto tag = static_cast<std::uint32_t>(head >> 32) + 1;
    if (free_head_.compare_exchange_weak(head, pack_free(tag, id), std::memory_order_acq_rel,
                                         std::memory_order_acquire))
      return;
  }
}

}  // namespace depq
