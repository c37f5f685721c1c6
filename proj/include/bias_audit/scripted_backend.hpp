#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bias_audit/backend.hpp"

namespace bias_audit {

/// One scripted reply: either text, or a simulated error of the given kind
/// ("provider_exhausted", "auth_error", "provider_error").
struct ScriptStep {
  std::string text;
  std::optional<std::string> error;
};

/// Deterministic backend answering from a table keyed by (statement id,
/// stage). The n-th call for a key gets the n-th step; calls past the end
/// repeat the last step. A wildcard entry (no statement id) supplies the
/// default for a stage.
///
/// Script files are JSON Lines:
///
///     {"statement_id": 7, "stage": "checker", "response": "FACT"}
///     {"statement_id": 7, "stage": "justifier", "responses": ["", "Neutral wording."]}
///     {"stage": "baseline", "response": "unbiased"}
///     {"statement_id": 9, "stage": "checker", "error": "provider_exhausted"}
///
/// `responses` elements may also be objects of the form {"error": kind}.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::string name = "scripted");

  static std::unique_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

  void script(StatementId id, Stage stage, std::vector<ScriptStep> steps);
  void script(StatementId id, Stage stage, const std::string& text);
  void script_default(Stage stage, std::vector<ScriptStep> steps);

  /// Sleep this long inside every call. Reported latency stays 0 so output
  /// is unaffected.
  void set_simulated_delay(std::chrono::milliseconds d) { delay_ = d; }

  BackendResponse complete(const BackendRequest& request) override;
  std::string id() const override { return name_; }

  std::size_t call_count() const;
  std::size_t call_count(StatementId id) const;
  std::size_t max_in_flight() const;

 private:
  using Key = std::pair<std::optional<StatementId>, Stage>;

  std::string name_;
  std::chrono::milliseconds delay_{0};
  std::map<Key, std::vector<ScriptStep>> steps_;

  mutable std::mutex mu_;
  std::map<std::pair<StatementId, Stage>, std::size_t> cursor_;
  std::map<StatementId, std::size_t> per_statement_;
  std::size_t calls_ = 0;
  std::size_t in_flight_ = 0;
  std::size_t max_in_flight_ = 0;
};

}  // namespace bias_audit
