#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <vector>

#include "depq/item.hpp"

namespace depq {

enum class ReclaimMode : std::uint8_t {
  Deferred,  // retired nodes are kept until the owning structure is destroyed
  Epoch,     // retired nodes are freed after a grace period
};

/// Retire protocol for nodes shared by two lists plus an epoch-based grace
/// period.
///
/// A node removed from one list calls on_unlink; the first call flips the
/// node's unlinked flag and returns false, the second one finds it set and
/// returns true, which is the signal that the node is gone from both lists
/// and may be retired.
class Reclaimer {
 public:
  static constexpr std::size_t kMaxThreads = 256;

  Reclaimer(ItemArena& arena, ReclaimMode mode);
  ~Reclaimer();
  Reclaimer(const Reclaimer&) = delete;
  Reclaimer& operator=(const Reclaimer&) = delete;

  ReclaimMode mode() const { return mode_; }

  /// Test-and-set of the node's unlinked flag. true = now safe to retire.
  /// A third call on the same node is a protocol violation; it is counted
  /// and returns false.
  bool on_unlink(NodeId node);

  /// Queues the node for deallocation after a grace period.
  void retire(NodeId node);

  /// Convenience: on_unlink then retire when it returns true.
  void unlink_and_maybe_retire(NodeId node) {
    if (on_unlink(node)) retire(node);
  }

  class Guard {
   public:
    Guard() = default;
    Guard(Guard&& o) noexcept : owner_(o.owner_), slot_(o.slot_) { o.owner_ = nullptr; }
    Guard& operator=(Guard&&) = delete;
    ~Guard() {
      if (owner_ != nullptr) owner_->exit(slot_);
    }

   private:
    friend class Reclaimer;
    Guard(Reclaimer* owner, std::size_t slot) : owner_(owner), slot_(slot) {}
    Reclaimer* owner_ = nullptr;
    std::size_t slot_ = 0;
  };

  /// Brackets one operation. A no-op in deferred mode.
  [[nodiscard]] Guard enter();

  /// Bumps the global epoch if every active thread has observed it, freeing
  /// the bucket retired two epochs ago. Returns whether the epoch advanced.
  bool try_advance();

  std::uint64_t epoch() const { return global_epoch_.load(std::memory_order_acquire); }
  std::uint64_t unlink_calls() const { return unlink_calls_.load(std::memory_order_relaxed); }
  std::uint64_t retired() const { return retired_.load(std::memory_order_relaxed); }
  std::uint64_t deallocated() const { return deallocated_.load(std::memory_order_relaxed); }
  std::uint64_t protocol_violations() const {
    return violations_.load(std::memory_order_relaxed);
  }
  std::size_t pending() const;

 private:
  void exit(std::size_t slot);

  struct alignas(64) Slot {
    std::atomic<bool> in_use{false};
    std::atomic<std::uint64_t> epoch{0};
  };

  ItemArena& arena_;
  ReclaimMode mode_;
  std::array<Slot, kMaxThreads> slots_{};
  std::atomic<std::uint64_t> global_epoch_{0};
  mutable std::mutex retire_mu_;
  std::array<std::vector<NodeId>, 3> buckets_;
  std::atomic<std::uint64_t> unlink_calls_{0};
  std::atomic<std::uint64_t> retired_{0};
  std::atomic<std::uint64_t> deallocated_{0};
  std::atomic<std::uint64_t> violations_{0};
};

}  // namespace depq
