#include "bias_audit/backend.hpp"

#include <cmath>
#include <stdexcept>

namespace bias_audit {

void validate(const BackendRequest& request) {
  if (request.prompt.empty()) throw std::invalid_argument("backend request with empty prompt");
  if (!(request.temperature >= 0.0 && request.temperature <= 1.0)) {
    throw std::invalid_argument("temperature must lie in [0, 1]");
  }
  if (request.max_output_tokens <= 0) throw std::invalid_argument("max_output_tokens must be positive");
}

std::chrono::milliseconds RetryPolicy::delay_before(int retry) const {
  const double base = static_cast<double>(initial_delay.count());
  const double scaled = base * std::pow(multiplier, std::max(0, retry - 1));
  const double capped = std::min(scaled, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<long long>(capped));
}

}  // namespace bias_audit
