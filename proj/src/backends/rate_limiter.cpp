#include "crisis/backends/rate_limiter.hpp"

#include "crisis/common/error.hpp"

namespace crisis::backends {

RateLimiter::RateLimiter(std::size_t limit, Clock::duration window)
    : limit_(limit), window_(window) {
  if (limit == 0) throw ValidationError("rate limit must be positive");
}

RateLimiter::Permit::~Permit() {
  if (owner_ != nullptr) owner_->release();
}

void RateLimiter::prune(Clock::time_point now) {
  while (!completed_.empty() && completed_.front() + window_ <= now) completed_.pop_front();
}

RateLimiter::Permit RateLimiter::acquire() {
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = Clock::now();
    prune(now);
    if (in_flight_ + completed_.size() < limit_) break;
    if (!completed_.empty()) {
      cv_.wait_until(lock, completed_.front() + window_);
    } else {
      cv_.wait(lock);
    }
  }
  ++in_flight_;
  return Permit(this);
}

void RateLimiter::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
    completed_.push_back(Clock::now());
  }
  cv_.notify_all();
}

}  // namespace crisis::backends
