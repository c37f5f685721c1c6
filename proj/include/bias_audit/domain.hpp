#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bias_audit {

using StatementId = std::uint64_t;

/// Ground-truth or predicted label. `Biased` is the positive class for every
/// metric.
enum class BiasLabel { Biased, Unbiased };

enum class StatementType { Fact, Opinion };

enum class BiasLevel { High, Low };

enum class FactCheckVerdict { Clean, PotentiallyBiased };

/// Agent stages. Each stage is one kind of backend call.
enum class Stage { Checker, FactVerifier, Validator, Justifier, Baseline };

struct Statement {
  StatementId id = 0;
  std::string text;
  BiasLabel true_label = BiasLabel::Unbiased;

  friend bool operator==(const Statement&, const Statement&) = default;
};

struct FactCheckOutcome {
  FactCheckVerdict verdict = FactCheckVerdict::Clean;
  /// Verifier's free-text rationale when it said more than the keyword.
  std::optional<std::string> note;

  friend bool operator==(const FactCheckOutcome&, const FactCheckOutcome&) = default;
};

/// Telemetry for one backend call made while analysing a statement.
struct CallSummary {
  Stage stage = Stage::Checker;
  double latency_ms = 0.0;
  int retries = 0;

  friend bool operator==(const CallSummary&, const CallSummary&) = default;
};

/// High maps to Biased; Low and "validation never ran" map to Unbiased.
BiasLabel label_from_bias_level(std::optional<BiasLevel> level) noexcept;

/// Full trace of one statement through the agent pipeline.
///
/// Construction validates the structural invariants: a fact check exists iff
/// the statement was typed Fact, a bias level exists iff the validator ran,
/// the predicted label follows from the bias level, and the justification is
/// non-empty. Violations throw InvariantViolation.
class AnalysisRecord {
 public:
  struct Fields {
    Statement statement;
    StatementType statement_type = StatementType::Opinion;
    std::optional<FactCheckOutcome> fact_check;
    std::optional<BiasLevel> bias_level;
    std::string justification;
    BiasLabel predicted_label = BiasLabel::Unbiased;
    /// Justification is a placeholder because the justifier failed.
    bool degraded = false;
    std::vector<CallSummary> backend_calls;
  };

  explicit AnalysisRecord(Fields fields);

  const Statement& statement() const noexcept { return f_.statement; }
  StatementType statement_type() const noexcept { return f_.statement_type; }
  const std::optional<FactCheckOutcome>& fact_check() const noexcept { return f_.fact_check; }
  const std::optional<BiasLevel>& bias_level() const noexcept { return f_.bias_level; }
  const std::string& justification() const noexcept { return f_.justification; }
  BiasLabel predicted_label() const noexcept { return f_.predicted_label; }
  bool degraded() const noexcept { return f_.degraded; }
  const std::vector<CallSummary>& backend_calls() const noexcept { return f_.backend_calls; }
  const Fields& fields() const noexcept { return f_; }

  friend bool operator==(const AnalysisRecord& a, const AnalysisRecord& b);

 private:
  Fields f_;
};

/// Zero-shot baseline outcome. `raw_response` is kept verbatim and must parse
/// to the predicted label under the biased/unbiased keyword contract.
class BaselineRecord {
 public:
  BaselineRecord(Statement statement, std::string raw_response, BiasLabel predicted_label);

  const Statement& statement() const noexcept { return statement_; }
  const std::string& raw_response() const noexcept { return raw_response_; }
  BiasLabel predicted_label() const noexcept { return predicted_label_; }

  friend bool operator==(const BaselineRecord&, const BaselineRecord&) = default;

 private:
  Statement statement_;
  std::string raw_response_;
  BiasLabel predicted_label_;
};

/// A statement that could not be scored. Kept out of every metric.
struct StatementFailure {
  StatementId id = 0;
  Stage stage = Stage::Checker;
  std::string kind;
  std::string message;

  friend bool operator==(const StatementFailure&, const StatementFailure&) = default;
};

// Lowercase wire names ("biased", "fact", "high", "potentially_biased",
// "fact_verifier", ...). The parse functions return nullopt on unknown input.
std::string_view to_string(BiasLabel v) noexcept;
std::string_view to_string(StatementType v) noexcept;
std::string_view to_string(BiasLevel v) noexcept;
std::string_view to_string(FactCheckVerdict v) noexcept;
std::string_view to_string(Stage v) noexcept;

std::optional<BiasLabel> parse_bias_label(std::string_view s) noexcept;
std::optional<StatementType> parse_statement_type(std::string_view s) noexcept;
std::optional<BiasLevel> parse_bias_level(std::string_view s) noexcept;
std::optional<FactCheckVerdict> parse_fact_check_verdict(std::string_view s) noexcept;
std::optional<Stage> parse_stage(std::string_view s) noexcept;

/// True when `text` has at least one non-whitespace character.
bool has_content(std::string_view text) noexcept;

}  // namespace bias_audit
