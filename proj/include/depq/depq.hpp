#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depq/key.hpp"

namespace depq {

/// Exact counters gathered from a structure after a run.
struct DepqStats {
  std::uint64_t failed_reserve_min = 0;  // reservation lost by an extract_min
  std::uint64_t failed_reserve_max = 0;
  std::uint64_t successful_min = 0;      // extract_min returning a key
  std::uint64_t successful_max = 0;
  std::uint64_t failed_insert_cas = 0;
  std::uint64_t retired = 0;
  std::uint64_t deallocated = 0;
  std::vector<std::uint64_t> batch_sizes_min;
  std::vector<std::uint64_t> batch_sizes_max;
};

/// A double-ended priority queue over integer user keys.
class Depq {
 public:
  virtual ~Depq() = default;

  virtual void insert(UserKey k) = 0;
  virtual std::optional<UserKey> extract_min() = 0;
  virtual std::optional<UserKey> extract_max() = 0;

  /// Keys currently in the structure. Quiescent only.
  virtual std::vector<UserKey> quiescent_contents() const = 0;

  /// Structural self-check. Quiescent only. Empty string when healthy.
  virtual std::string audit() const { return {}; }

  virtual DepqStats stats() const = 0;
  virtual std::string name() const = 0;
};

}  // namespace depq
