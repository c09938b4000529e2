#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace depq::sched {

/// Instrumented points where a managed thread hands control back to the
/// controlled scheduler. Unmanaged threads pass straight through.
enum class Site : std::uint8_t {
  Start,
  InsertBetweenQueues,  // after the Min-side insert, before the Max-side insert
  InsertBeforeCas,      // link of the new node written, CAS not yet attempted
  AfterMark,            // fetch-or done, last_deleted not yet written
  AfterQueueExtract,    // inner queue returned an item, reservation not yet tried
  CombinerWait,         // spinning on a combining record
  Done,
};

const char* to_string(Site s);

class Scheduler;
void arrive(Scheduler* s, int tid, Site site);

namespace detail {
struct Binding {
  Scheduler* scheduler = nullptr;
  int thread = -1;
};
inline thread_local Binding tl_binding;
}  // namespace detail

/// Called from instrumented code. No-op unless the calling thread is managed.
inline void point(Site s) {
  auto& b = detail::tl_binding;
  if (b.scheduler != nullptr) [[unlikely]]
    arrive(b.scheduler, b.thread, s);
}

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cooperative scheduler: at most one managed thread runs at a time and only
/// when granted. Threads spawned here start parked at Site::Start; the driver
/// advances them one instrumented point at a time. Threads that are not
/// spawned by the scheduler run freely, so a test can freeze workers at named
/// points while the driving thread operates on the structure directly.
class Scheduler {
 public:
  Scheduler() = default;
  ~Scheduler();
  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  int spawn(std::function<void()> body);

  /// Runs thread `tid` until it parks at its next point (or finishes).
  Site step(int tid);

  /// Steps `tid` until it parks at `target`. Throws ScheduleError if the
  /// thread finishes or exceeds `max_steps` without reaching it.
  void run_until(int tid, Site target, int max_steps = 10000);

  /// Steps `tid` to completion. Throws ScheduleError after `max_steps`.
  void run_to_end(int tid, int max_steps = 1000000);

  Site where(int tid) const;
  bool done(int tid) const;
  std::uint64_t visits(int tid, Site s) const;
  std::size_t size() const;

  /// Lets every remaining thread run free and joins them.
  void release_all();

 private:
  friend void arrive(Scheduler*, int, Site);
  struct Worker {
    std::thread thread;
    Site site = Site::Start;
    bool granted = false;
    bool parked = false;
    bool done = false;
    std::vector<std::uint64_t> visits = std::vector<std::uint64_t>(7, 0);
    std::exception_ptr error;
  };
  void park(int tid, Site s);

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<Worker>> workers_;
  bool free_run_ = false;
};

}  // namespace depq::sched
