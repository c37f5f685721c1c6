#pragma once

#include <chrono>
#include <functional>
#include <mutex>

namespace bias_audit {

/// Token bucket limiting calls per minute. Callers that find the bucket
/// empty take a token on credit and wait until it would have refilled, so
/// concurrent callers are spaced evenly instead of racing.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;
  using NowFn = std::function<Clock::time_point()>;
  using SleepFn = std::function<void(Clock::duration)>;

  /// `requests_per_minute <= 0` disables limiting. `burst` is the bucket
  /// capacity, at least 1.
  explicit TokenBucket(double requests_per_minute, double burst = 1.0, NowFn now = {},
                       SleepFn sleep = {});

  /// Takes one token; returns how long the caller must wait before using it.
  Clock::duration reserve();

  /// reserve() followed by the wait.
  void acquire();

  bool unlimited() const noexcept { return rate_per_sec_ <= 0.0; }

 private:
  double rate_per_sec_;
  double capacity_;
  NowFn now_;
  SleepFn sleep_;

  std::mutex mu_;
  double tokens_;
  Clock::time_point last_;
};

}  // namespace bias_audit
