#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bias_audit/backend.hpp"
#include "bias_audit/domain.hpp"
#include "bias_audit/prompt.hpp"

namespace bias_audit {

enum class RunMode { Pipeline, Baseline };

std::string_view to_string(RunMode mode) noexcept;
std::optional<RunMode> parse_run_mode(std::string_view s) noexcept;

/// Stages visited by one statement, in order.
using RouteTrace = std::vector<Stage>;

/// The stages recorded in a record's backend calls, with repeated calls to
/// the same stage (parse retries) collapsed.
RouteTrace route_trace(const AnalysisRecord& record);

/// The three legal pipeline routes:
/// checker → fact_verifier → justifier,
/// checker → fact_verifier → validator → justifier,
/// checker → validator → justifier.
bool is_legal_route(const RouteTrace& trace);

/// Placeholder stored when the justifier cannot produce text.
inline constexpr std::string_view kJustificationUnavailable = "justification unavailable (backend error)";

struct PipelineOptions {
  double temperature = 0.0;
  int keyword_max_tokens = 16;
  int justification_max_tokens = 300;
};

template <typename Record>
using StatementOutcome = std::variant<Record, StatementFailure>;

struct Justification {
  std::string text;
  bool degraded = false;
};

/// The checker → (fact verifier | validator) → justifier router and the
/// single-prompt baseline, bound to one backend and one template set.
///
/// Stage methods append one CallSummary per backend call to `calls` when it
/// is non-null. Keyword stages retry once with a one-word reminder when the
/// answer cannot be parsed, then throw Unparseable; backend errors
/// propagate. Calling a stage out of route order throws std::logic_error.
/// All methods are safe to call concurrently.
class Pipeline {
 public:
  Pipeline(Backend& backend, const PromptSet& prompts, PipelineOptions options = {});

  StatementType classify_statement(const Statement& s, std::vector<CallSummary>* calls = nullptr);

  /// Requires `type == Fact`.
  FactCheckOutcome verify_factual_bias(const Statement& s, StatementType type,
                                       std::vector<CallSummary>* calls = nullptr);

  /// Requires an opinion, or a fact whose check came back potentially biased.
  /// The two cases use different templates.
  BiasLevel validate_bias(const Statement& s, StatementType type,
                          const std::optional<FactCheckOutcome>& fact_check,
                          std::vector<CallSummary>* calls = nullptr);

  struct JustificationContext {
    StatementType statement_type = StatementType::Opinion;
    std::optional<FactCheckOutcome> fact_check;
    std::optional<BiasLevel> bias_level;
  };

  /// Never throws for backend trouble: an empty answer is retried once, and
  /// a second empty answer or a backend error yields the degraded
  /// placeholder. MissingTranscript still propagates.
  Justification write_justification(const Statement& s, BiasLabel verdict, const JustificationContext& context,
                                    std::vector<CallSummary>* calls = nullptr);

  /// Full route for one statement. Stage failures become a StatementFailure;
  /// MissingTranscript propagates because it means the replay itself is broken.
  StatementOutcome<AnalysisRecord> run_pipeline_one(const Statement& s);

  StatementOutcome<BaselineRecord> run_baseline_one(const Statement& s);

  Backend& backend() noexcept { return backend_; }

 private:
  struct KeywordAnswer {
    std::string keyword;
    std::string response;
  };

  KeywordAnswer ask_keyword(const Statement& s, PromptKind kind, std::span<const std::string_view> allowed,
                            std::vector<CallSummary>* calls);
  BackendResponse call(const Statement& s, PromptKind kind, std::string prompt, int max_tokens,
                       std::vector<CallSummary>* calls);

  Backend& backend_;
  const PromptSet& prompts_;
  PipelineOptions options_;
};

/// Records of one run, ordered by statement id. Only the vector matching
/// `mode` is populated.
struct RunResults {
  RunMode mode = RunMode::Pipeline;
  std::vector<AnalysisRecord> analyses;
  std::vector<BaselineRecord> baselines;
  std::vector<StatementFailure> failures;

  std::size_t scored() const noexcept { return mode == RunMode::Pipeline ? analyses.size() : baselines.size(); }
  std::size_t total() const noexcept { return scored() + failures.size(); }
  double failure_fraction() const noexcept {
    return total() == 0 ? 0.0 : static_cast<double>(failures.size()) / static_cast<double>(total());
  }

  friend bool operator==(const RunResults&, const RunResults&) = default;
};

/// Processes `statements` with at most `concurrency` in flight. Each
/// statement's stages run sequentially; output order is by statement id and
/// does not depend on `concurrency` for a deterministic backend. Throws
/// std::invalid_argument when concurrency is 0.
RunResults run_batch(std::span<const Statement> statements, RunMode mode, Pipeline& pipeline,
                     std::size_t concurrency);

}  // namespace bias_audit
