#include "depq/sched.hpp"

namespace depq::sched {

const char* to_string(Site s) {
  switch (s) {
    case Site::Start: return "start";
    case Site::InsertBetweenQueues: return "insert-between-queues";
    case Site::InsertBeforeCas: return "insert-before-cas";
    case Site::AfterMark: return "after-mark";
    case Site::AfterQueueExtract: return "after-queue-extract";
    case Site::CombinerWait: return "combiner-wait";
    case Site::Done: return "done";
  }
  return "?";
}

void arrive(Scheduler* s, int tid, Site site) { s->park(tid, site); }

void Scheduler::park(int tid, Site s) {
  std::unique_lock lk(mu_);
  Worker& w = *workers_[tid];
  w.site = s;
  ++w.visits[static_cast<int>(s)];
  if (free_run_) return;
  w.parked = true;
  w.granted = false;
  cv_.notify_all();
  cv_.wait(lk, [&] { return w.granted || free_run_; });
  w.parked = false;
}

Scheduler::~Scheduler() { release_all(); }

int Scheduler::spawn(std::function<void()> body) {
  std::unique_lock lk(mu_);
  const int tid = static_cast<int>(workers_.size());
  workers_.push_back(std::make_unique<Worker>());
  Worker* w = workers_.back().get();
  w->thread = std::thread([this, tid, w, body = std::move(body)] {
    detail::tl_binding = {this, tid};
    park(tid, Site::Start);
    try {
      body();
    } catch (...) {
      w->error = std::current_exception();
    }
    detail::tl_binding = {};
    std::lock_guard g(mu_);
    w->done = true;
    w->site = Site::Done;
    w->granted = false;
    cv_.notify_all();
  });
  cv_.wait(lk, [&] { return w->parked; });
  return tid;
}

Site Scheduler::step(int tid) {
  std::unique_lock lk(mu_);
  Worker& w = *workers_.at(tid);
  if (w.done) return Site::Done;
  w.granted = true;
  cv_.notify_all();
  cv_.wait(lk, [&] { return !w.granted; });
  if (w.done && w.error) std::rethrow_exception(w.error);
  return w.site;
}

void Scheduler::run_until(int tid, Site target, int max_steps) {
  for (int i = 0; i < max_steps; ++i) {
    const Site s = step(tid);
    if (s == target) return;
    if (s == Site::Done)
      throw ScheduleError("thread " + std::to_string(tid) + " finished before reaching " +
                          to_string(target));
  }
  throw ScheduleError("thread " + std::to_string(tid) + " did not reach " + to_string(target) +
                      " within the step budget");
}

void Scheduler::run_to_end(int tid, int max_steps) {
  for (int i = 0; i < max_steps; ++i)
    if (step(tid) == Site::Done) return;
  throw ScheduleError("thread " + std::to_string(tid) + " did not finish within the step budget");
}

Site Scheduler::where(int tid) const {
  std::lock_guard g(mu_);
  return workers_.at(tid)->site;
}

bool Scheduler::done(int tid) const {
  std::lock_guard g(mu_);
  return workers_.at(tid)->done;
}

std::uint64_t Scheduler::visits(int tid, Site s) const {
  std::lock_guard g(mu_);
  return workers_.at(tid)->visits[static_cast<int>(s)];
}

std::size_t Scheduler::size() const {
  std::lock_guard g(mu_);
  return workers_.size();
}

void Scheduler::release_all() {
  {
    std::lock_guard g(mu_);
    free_run_ = true;
    cv_.notify_all();
  }
  for (auto& w : workers_)
    if (w->thread.joinable()) w->thread.join();
}

}  // namespace depq::sched
