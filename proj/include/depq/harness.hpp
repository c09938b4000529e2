#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "depq/depq.hpp"
#include "depq/dual_depq.hpp"
#include "depq/lincheck.hpp"
#include "depq/reclaim.hpp"

namespace depq::harness {

enum class Impl : std::uint8_t { ListDepq, DualHeap, DualList };

const char* to_string(Impl i);
Impl parse_impl(const std::string& s);
MultiConsumerMode parse_mode(const std::string& s);
ReclaimMode parse_reclaim(const std::string& s);
const char* to_string(ReclaimMode m);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct WorkloadConfig {
  Impl impl = Impl::ListDepq;
  MultiConsumerMode mode = MultiConsumerMode::Combining;
  int threads_insert = 1;
  int threads_min = 1;
  int threads_max = 1;
  std::uint64_t prefill = 0;
  UserKey key_lo = 0;
  UserKey key_hi = 1'000'000;
  std::optional<std::uint64_t> ops_per_thread;
  std::optional<std::uint64_t> duration_ms;
  std::uint64_t seed = 1;
  std::size_t batch_cap = 64;
  ReclaimMode reclaim = ReclaimMode::Deferred;
  /// Run every worker's op stream round-robin on the calling thread.
  bool sequential = false;
  bool optional_delete = false;
  /// Mutation testing: list-depq extractions skip the reservation.
  bool inject_bug = false;
};

/// Throws ConfigError on an invalid configuration.
void validate(const WorkloadConfig& cfg);

/// Builds the configured structure. Dual implementations are wrapped in the
/// multi-consumer facade.
std::unique_ptr<Depq> make_depq(const WorkloadConfig& cfg);

struct RunReport {
  std::string impl;
  std::string mode;
  std::string reclaim;
  int threads_insert = 0;
  int threads_min = 0;
  int threads_max = 0;
  std::uint64_t seed = 0;
  std::uint64_t inserts = 0;
  std::uint64_t extract_min_calls = 0;
  std::uint64_t extract_max_calls = 0;
  std::uint64_t extract_min_empty = 0;
  std::uint64_t extract_max_empty = 0;
  double wall_ms = 0;
  DepqStats stats;
  std::uint64_t inserted_total = 0;  // prefill included
  std::uint64_t returned_total = 0;
  std::uint64_t remaining_total = 0;
  bool accounting_ok = false;  // inserted == returned + remaining, as multisets
  bool charging_ok = false;    // failed reservations <= opposite-end successes
  bool audit_ok = false;
  std::string audit_message;
  /// Sorted returned keys; kept for determinism checks.
  std::vector<UserKey> returned;

  double ops_per_sec(std::uint64_t ops) const { return wall_ms > 0 ? ops * 1000.0 / wall_ms : 0; }
};

RunReport run_bench(const WorkloadConfig& cfg);
std::string to_json(const RunReport& r);
std::string csv_header();
std::string to_csv(const RunReport& r);

struct StressConfig {
  WorkloadConfig base;
  int windows = 500;
  int min_threads = 2;
  int max_threads = 6;
  int max_ops = 12;
  lincheck::CheckOptions check;
};

struct StressResult {
  int windows = 0;
  int linearizable = 0;
  int not_linearizable = 0;
  int budget_exceeded = 0;
  std::optional<int> first_failure;
  lincheck::History failing;
  std::vector<lincheck::History> histories;  // only when keep_histories
};

/// Runs randomized short windows, recording and checking each. Each history
/// is appended to `capture` (if given) followed by a blank line.
StressResult run_stress(const StressConfig& cfg, std::ostream* capture = nullptr,
                        bool keep_histories = false);

struct ReplayResult {
  std::string name;
  bool passed = false;
  std::string verdict;
  std::vector<std::string> lines;
};

/// Forces one of the named interleavings: "counterexample", "twist",
/// "single-item-race". Throws sched::ScheduleError if the schedule cannot be
/// realized and std::invalid_argument for an unknown name.
ReplayResult replay(const std::string& name);
std::vector<std::string> replay_names();

}  // namespace depq::harness
