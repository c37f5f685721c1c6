#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "bias_audit/domain.hpp"
#include "bias_audit/errors.hpp"

namespace bias_audit {

struct BackendRequest {
  StatementId statement_id = 0;
  Stage stage = Stage::Checker;
  std::string prompt;
  /// Content hash of the template the prompt was rendered from.
  std::string prompt_hash;
  double temperature = 0.0;
  int max_output_tokens = 64;
};

struct BackendResponse {
  std::string text;
  std::string provider_id;
  double latency_ms = 0.0;
  /// 1 on first-try success; at most max_retries + 1.
  int attempt = 1;
};

/// Throws std::invalid_argument for an empty prompt, a temperature outside
/// [0, 1], or a non-positive token budget.
void validate(const BackendRequest& request);

/// A language-model provider. Implementations must allow concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse complete(const BackendRequest& request) = 0;
  /// Identity recorded in run manifests, e.g. "openai:gpt-4o".
  virtual std::string id() const = 0;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{30000};

  /// Deterministic delay before retry number `retry` (1-based).
  std::chrono::milliseconds delay_before(int retry) const;
};

/// Outcome of one attempt inside with_retries.
struct TransientFailure {
  std::string message;
  /// Server-suggested wait (Retry-After), honoured up to max_delay.
  std::optional<std::chrono::milliseconds> retry_after;
};

template <typename T>
using AttemptResult = std::variant<T, TransientFailure>;

/// Runs `attempt(n)` for n = 1..max_retries+1 until it returns a value,
/// sleeping with exponential backoff between transient failures. Exceptions
/// thrown by `attempt` are permanent and propagate. Returns the value and the
/// attempt number that produced it; throws ProviderExhausted when every
/// attempt failed.
template <typename T, typename Attempt, typename Sleep>
std::pair<T, int> with_retries(const RetryPolicy& policy, Attempt&& attempt, Sleep&& sleep) {
  const int total = policy.max_retries + 1;
  std::string last;
  for (int n = 1; n <= total; ++n) {
    AttemptResult<T> r = attempt(n);
    if (auto* value = std::get_if<T>(&r)) return {std::move(*value), n};
    auto& failure = std::get<TransientFailure>(r);
    last = std::move(failure.message);
    if (n == total) break;
    auto delay = policy.delay_before(n);
    if (failure.retry_after) delay = std::max(delay, std::min(*failure.retry_after, policy.max_delay));
    sleep(delay);
  }
  throw ProviderExhausted("all " + std::to_string(total) + " attempts failed; last error: " + last);
}

}  // namespace bias_audit
