#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "depq/depq.hpp"
#include "depq/oracle.hpp"

namespace depq::lincheck {

/// Result field of an event: absent (Insert or pending), NONE, or a key.
struct Outcome {
  enum class Tag : std::uint8_t { Absent, Empty, Value };
  Tag tag = Tag::Absent;
  UserKey value = 0;

  static Outcome absent() { return {}; }
  static Outcome empty() { return {Tag::Empty, 0}; }
  static Outcome of(UserKey k) { return {Tag::Value, k}; }
  static Outcome from(const std::optional<UserKey>& r) { return r ? of(*r) : empty(); }

  bool matches(const std::optional<UserKey>& r) const {
    if (tag == Tag::Empty) return !r.has_value();
    if (tag == Tag::Value) return r.has_value() && *r == value;
    return true;
  }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct Event {
  int thread = 0;
  OpKind kind = OpKind::Insert;
  std::optional<UserKey> arg;
  Outcome result;
  std::uint64_t invoke = 0;
  std::optional<std::uint64_t> response;  // absent = pending

  bool pending() const { return !response.has_value(); }
  friend bool operator==(const Event&, const Event&) = default;
};

using History = std::vector<Event>;

/// Structural checks: invoke < response, timestamps unique, at most one
/// pending op per thread and no op of that thread after it. Empty when valid.
std::string validate(const History& h);

// JSON-lines encoding, one event per line, fields in fixed order:
// {"thread":0,"kind":"Insert","arg":5,"result":null,"invoke":0,"response":1}
std::string to_json_line(const Event& e);
Event from_json_line(const std::string& line);
void write_jsonl(std::ostream& os, const History& h);
/// Blank lines separate histories; a file without blank lines is one history.
std::vector<History> read_jsonl(std::istream& is);

/// Wraps a DEPQ and brackets every call with fetch-increments of a shared
/// clock. Each worker thread passes its own index.
class Recorder {
 public:
  Recorder(Depq& target, int threads);

  void insert(int thread, UserKey k);
  std::optional<UserKey> extract_min(int thread);
  std::optional<UserKey> extract_max(int thread);

  /// Opens an event without running anything; used to script pending ops.
  std::size_t begin(int thread, OpKind kind, std::optional<UserKey> arg);
  void end(int thread, std::size_t index, Outcome result);

  /// All events ordered by invocation.
  History history() const;

 private:
  Depq& target_;
  std::atomic<std::uint64_t> clock_{0};
  std::vector<std::vector<Event>> per_thread_;
};

enum class Verdict : std::uint8_t { Linearizable, NotLinearizable, BudgetExceeded };

const char* to_string(Verdict v);

struct CheckOptions {
  std::size_t max_completed_ops = 20;
  std::uint64_t state_budget = 2'000'000;
};

struct CheckResult {
  Verdict verdict = Verdict::NotLinearizable;
  /// Indices into the history in linearization order (Linearizable only).
  /// Pending ops appear only if the witness needed them.
  std::vector<std::size_t> witness;
  std::uint64_t states = 0;
};

/// Decides whether `h` is linearizable with respect to SeqDepq by depth-first
/// search over real-time-respecting orders, memoizing (linearized set, oracle
/// contents) states that are known to fail. Pending ops may be linearized or
/// dropped. Throws std::invalid_argument if the history is malformed or has
/// more than max_completed_ops completed ops (or more than 64 ops in total).
CheckResult check(const History& h, const CheckOptions& opts = {});

/// Replays a witness through SeqDepq and checks it against real-time order.
bool witness_valid(const History& h, const std::vector<std::size_t>& witness);

}  // namespace depq::lincheck
