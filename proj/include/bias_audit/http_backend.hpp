#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "bias_audit/backend.hpp"
#include "bias_audit/rate_limiter.hpp"

namespace bias_audit {

struct ProviderConfig {
  std::string provider;
  std::string model;
  /// Endpoint root, e.g. "https://api.openai.com/v1". Requests go to
  /// `<base_url>/chat/completions`.
  std::string base_url;
  std::string api_key;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{60000};
  double requests_per_minute = 0.0;
  double burst = 1.0;
};

/// Client for any endpoint speaking the chat-completions JSON protocol.
///
/// HTTP 429, 408, 5xx, timeouts and connection errors are retried with
/// exponential backoff (honouring Retry-After). 401/403 throw AuthError
/// immediately; other 4xx throw ProviderError.
class HttpChatBackend : public Backend {
 public:
  using SleepFn = std::function<void(std::chrono::milliseconds)>;

  explicit HttpChatBackend(ProviderConfig config, SleepFn sleep = {});

  BackendResponse complete(const BackendRequest& request) override;
  std::string id() const override { return config_.provider + ":" + config_.model; }

  const ProviderConfig& config() const noexcept { return config_; }

 private:
  ProviderConfig config_;
  std::string origin_;
  std::string path_;
  SleepFn sleep_;
  TokenBucket limiter_;
};

/// Parsed `--backend` argument: `scripted:<file>`, `replay:<transcript>` or
/// `<provider>:<model>`. The model part may itself contain colons.
struct BackendSpec {
  enum class Kind { Scripted, Replay, Provider };
  Kind kind = Kind::Provider;
  /// Script or transcript path for Scripted/Replay; provider name otherwise.
  std::string target;
  std::string model;

  std::string str() const;
};

/// Throws ConfigError on malformed input.
BackendSpec parse_backend_spec(std::string_view text);

/// Built-in endpoint roots for well-known providers.
std::optional<std::string> default_base_url(std::string_view provider);

/// `BIAS_AUDIT_API_KEY_<PROVIDER>`, provider upper-cased with non
/// alphanumerics mapped to '_'.
std::string api_key_env_var(std::string_view provider);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Fills base URL and API key for a provider spec. The "local" provider
/// needs no key. Throws ConfigError naming the missing environment variable
/// or flag.
ProviderConfig resolve_provider(const BackendSpec& spec, const std::optional<std::string>& base_url_override,
                                const EnvLookup& env = process_env);

}  // namespace bias_audit
