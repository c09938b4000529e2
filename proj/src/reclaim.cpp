#include "depq/reclaim.hpp"

#include <functional>
#include <thread>

namespace depq {

Reclaimer::Reclaimer(ItemArena& arena, ReclaimMode mode) : arena_(arena), mode_(mode) {}

// Whatever is still queued dies with the arena; nothing else to do.
Reclaimer::~Reclaimer() = default;

bool Reclaimer::on_unlink(NodeId node) {
  unlink_calls_.fetch_add(1, std::memory_order_relaxed);
  const std::uint8_t prior = arena_.node(node).unlinked.fetch_add(1, std::memory_order_acq_rel);
  if (prior >= 2) {
    violations_.fetch_add(1, std::memory_order_relaxed);
    return false;
  }
  return prior == 1;
}

void Reclaimer::retire(NodeId node) {
  retired_.fetch_add(1, std::memory_order_relaxed);
  std::lock_guard g(retire_mu_);
  buckets_[global_epoch_.load(std::memory_order_seq_cst) % 3].push_back(node);
}

Reclaimer::Guard Reclaimer::enter() {
  if (mode_ == ReclaimMode::Deferred) return {};
  const std::size_t start = std::hash<std::thread::id>{}(std::this_thread::get_id()) % kMaxThreads;
  for (;;) {
    for (std::size_t i = 0; i < kMaxThreads; ++i) {
      Slot& s = slots_[(start + i) % kMaxThreads];
      bool expected = false;
      if (s.in_use.load(std::memory_order_relaxed) ||
          !s.in_use.compare_exchange_strong(expected, true, std::memory_order_seq_cst))
        continue;
      s.epoch.store(global_epoch_.load(std::memory_order_seq_cst), std::memory_order_seq_cst);
      return Guard(this, (start + i) % kMaxThreads);
    }
    std::this_thread::yield();
  }
}

void Reclaimer::exit(std::size_t slot) {
  slots_[slot].in_use.store(false, std::memory_order_seq_cst);
}

bool Reclaimer::try_advance() {
  if (mode_ == ReclaimMode::Deferred) return false;
  std::lock_guard g(retire_mu_);
  const std::uint64_t current = global_epoch_.load(std::memory_order_seq_cst);
  for (const Slot& s : slots_) {
    if (s.in_use.load(std::memory_order_seq_cst) &&
        s.epoch.load(std::memory_order_seq_cst) != current)
      return false;
  }
  const std::uint64_t next = current + 1;
  global_epoch_.store(next, std::memory_order_seq_cst);
  // Bucket (next + 1) % 3 holds nodes retired at epoch next - 2.
  auto& bucket = buckets_[(next + 1) % 3];
  for (NodeId n : bucket) arena_.free(n);
  deallocated_.fetch_add(bucket.size(), std::memory_order_relaxed);
  bucket.clear();
  return true;
}

std::size_t Reclaimer::pending() const {
  std::lock_guard g(retire_mu_);
  return buckets_[0].size() + buckets_[1].size() + buckets_[2].size();
}

}  // namespace depq
