#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>

namespace crisis::backends {

/// Sliding-window limiter: at most `limit` requests are in flight or have
/// completed within the trailing `window`. A request counts from the moment
/// its permit is granted until `window` after the permit is released, so any
/// `limit + 1` consecutive requests span at least one full window.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  class Permit {
   public:
    Permit(Permit&& other) noexcept : owner_(other.owner_) { other.owner_ = nullptr; }
    Permit& operator=(Permit&&) = delete;
    Permit(const Permit&) = delete;
    ~Permit();

   private:
    friend class RateLimiter;
    explicit Permit(RateLimiter* owner) : owner_(owner) {}
    RateLimiter* owner_;
  };

  RateLimiter(std::size_t limit, Clock::duration window);

  /// Blocks until a slot is free.
  Permit acquire();

  std::size_t limit() const noexcept { return limit_; }
  Clock::duration window() const noexcept { return window_; }

 private:
  void release();
  void prune(Clock::time_point now);

  std::size_t limit_;
  Clock::duration window_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::deque<Clock::time_point> completed_;
};

}  // namespace crisis::backends
