#pragma once

#include <chrono>
#include <mutex>
#include <thread>

namespace launchpulse {

/// Time source used by the cache, the rate limiter and retry backoff, so tests can
/// run them against simulated time.
class Clock {
 public:
  using time_point = std::chrono::system_clock::time_point;
  using duration = std::chrono::system_clock::duration;

  virtual ~Clock() = default;
  virtual time_point now() const = 0;
  virtual void sleep_for(duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  time_point now() const override { return std::chrono::system_clock::now(); }
  void sleep_for(duration d) override {
    if (d > duration::zero()) std::this_thread::sleep_for(d);
  }
};

/// Time advances only through sleep_for() and advance().
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(time_point start = time_point{}) : now_(start) {}

  time_point now() const override {
    std::lock_guard lock(mu_);
    return now_;
  }
  void sleep_for(duration d) override { advance(d); }

  void advance(duration d) {
    std::lock_guard lock(mu_);
    if (d > duration::zero()) {
      now_ += d;
      slept_ += d;
      ++sleeps_;
    }
  }

  duration total_slept() const {
    std::lock_guard lock(mu_);
    return slept_;
  }
  int sleep_count() const {
    std::lock_guard lock(mu_);
    return sleeps_;
  }

 private:
  mutable std::mutex mu_;
  time_point now_;
  duration slept_{};
  int sleeps_ = 0;
};

}  // namespace launchpulse
