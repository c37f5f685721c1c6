#include "bias_audit/rate_limiter.hpp"

#include <algorithm>
#include <thread>

namespace bias_audit {

TokenBucket::TokenBucket(double requests_per_minute, double burst, NowFn now, SleepFn sleep)
    : rate_per_sec_(requests_per_minute / 60.0),
      capacity_(std::max(1.0, burst)),
      now_(now ? std::move(now) : NowFn(&Clock::now)),
      sleep_(sleep ? std::move(sleep) : SleepFn([](Clock::duration d) { std::this_thread::sleep_for(d); })),
      tokens_(capacity_),
      last_(now_()) {}

TokenBucket::Clock::duration TokenBucket::reserve() {
  if (unlimited()) return Clock::duration::zero();
  std::lock_guard lock(mu_);
  const auto t = now_();
  const double elapsed = std::chrono::duration<double>(t - last_).count();
  last_ = t;
  tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_sec_);
  tokens_ -= 1.0;
  if (tokens_ >= 0.0) return Clock::duration::zero();
  return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(-tokens_ / rate_per_sec_));
}

void TokenBucket::acquire() {
  const auto wait = reserve();
  if (wait > Clock::duration::zero()) sleep_(wait);
}

}  // namespace bias_audit
