#include "bias_audit/http_backend.hpp"

#include <cctype>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace bias_audit {

namespace {

// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base URL needs a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  std::string origin = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {origin, path};
}

std::optional<std::chrono::milliseconds> parse_retry_after(const httplib::Result& res) {
  if (!res->has_header("Retry-After")) return std::nullopt;
  const auto value = res->get_header_value("Retry-After");
  char* end = nullptr;
  const double seconds = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || seconds < 0) return std::nullopt;
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

bool transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

std::string snippet(const std::string& body) {
  constexpr std::size_t kMax = 300;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

HttpChatBackend::HttpChatBackend(ProviderConfig config, SleepFn sleep)
    : config_(std::move(config)),
      sleep_(sleep ? std::move(sleep)
                   : SleepFn([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      limiter_(config_.requests_per_minute, config_.burst) {
  std::tie(origin_, path_) = split_url(config_.base_url);
  path_ += "/chat/completions";
}

BackendResponse HttpChatBackend::complete(const BackendRequest& request) {
  validate(request);

  nlohmann::json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output_tokens;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const auto started = std::chrono::steady_clock::now();
  auto attempt = [&](int) -> AttemptResult<std::string> {
    limiter_.acquire();
    httplib::Client client(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) return TransientFailure{"transport error: " + httplib::to_string(res.error()), std::nullopt};
    const int status = res->status;
    if (status == 401 || status == 403) {
      throw AuthError("HTTP " + std::to_string(status) + " from " + id() + ": " + snippet(res->body));
    }
    if (transient_status(status)) {
      return TransientFailure{"HTTP " + std::to_string(status) + ": " + snippet(res->body),
                              parse_retry_after(res)};
    }
    if (status < 200 || status >= 300) {
      throw ProviderError("HTTP " + std::to_string(status) + " from " + id() + ": " + snippet(res->body));
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      const auto& content = j.at("choices").at(0).at("message").at("content");
      return content.is_null() ? std::string() : content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      return TransientFailure{std::string("malformed completion body: ") + e.what(), std::nullopt};
    }
  };

  auto [text, n] = with_retries<std::string>(config_.retry, attempt, sleep_);
  const double latency =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return BackendResponse{std::move(text), id(), latency, n};
}

std::string BackendSpec::str() const {
  switch (kind) {
    case Kind::Scripted: return "scripted:" + target;
    case Kind::Replay: return "replay:" + target;
    case Kind::Provider: return target + ":" + model;
  }
  return {};
}

BackendSpec parse_backend_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw ConfigError("backend must look like scripted:<file>, replay:<transcript> or <provider>:<model>, got '" +
                      std::string(text) + "'");
  }
  const std::string head(text.substr(0, colon));
  const std::string rest(text.substr(colon + 1));
  if (head == "scripted") return {BackendSpec::Kind::Scripted, rest, ""};
  if (head == "replay") return {BackendSpec::Kind::Replay, rest, ""};
  return {BackendSpec::Kind::Provider, head, rest};
}

std::optional<std::string> default_base_url(std::string_view provider) {
  if (provider == "openai") return "https://api.openai.com/v1";
  if (provider == "openrouter") return "https://openrouter.ai/api/v1";
  if (provider == "anthropic") return "https://api.anthropic.com/v1";
  if (provider == "gemini") return "https://generativelanguage.googleapis.com/v1beta/openai";
  if (provider == "local") return "http://localhost:8080/v1";
  return std::nullopt;
}

std::string api_key_env_var(std::string_view provider) {
  std::string name = "BIAS_AUDIT_API_KEY_";
  for (unsigned char c : provider) {
    name.push_back(std::isalnum(c) ? static_cast<char>(std::toupper(c)) : '_');
  }
  return name;
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str()); v && *v) return std::string(v);
  return std::nullopt;
}

ProviderConfig resolve_provider(const BackendSpec& spec, const std::optional<std::string>& base_url_override,
                                const EnvLookup& env) {
  if (spec.kind != BackendSpec::Kind::Provider) throw ConfigError("not a provider backend: " + spec.str());
  ProviderConfig cfg;
  cfg.provider = spec.target;
  cfg.model = spec.model;
  if (base_url_override) {
    cfg.base_url = *base_url_override;
  } else if (auto url = default_base_url(spec.target)) {
    cfg.base_url = *url;
  } else {
    throw ConfigError("unknown provider '" + spec.target + "': pass --base-url");
  }
  split_url(cfg.base_url);
  const auto var = api_key_env_var(spec.target);
  if (auto key = env(var)) {
    cfg.api_key = *key;
  } else if (spec.target != "local") {
    throw ConfigError("missing API key: set " + var);
  }
  return cfg;
}

}  // namespace bias_audit
