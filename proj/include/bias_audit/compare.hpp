#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bias_audit/metrics.hpp"
#include "bias_audit/report.hpp"

namespace bias_audit {

/// Metrics of one results file over a set of scored statements.
struct RunSummary {
  std::string label;
  RunMode mode = RunMode::Pipeline;
  ConfusionMatrix confusion;
  MetricsReport metrics;
  /// Statements of the run left out of the metrics: failures, plus scored
  /// ids dropped when aligning with another run.
  std::size_t unscored = 0;
};

/// Summarises every scored record in `doc`. Throws EmptyRun when nothing was
/// scored.
RunSummary summarize(const ResultsDocument& doc, std::string label);

struct Comparison {
  RunSummary a;
  RunSummary b;
  /// Accuracy test of b against a; absent when the pooled proportion is
  /// degenerate (both runs perfect or both entirely wrong).
  std::optional<ZTestResult> z_test;
  std::vector<std::string> warnings;
};

/// Aligns two runs on the ids scored in both (warning when the id sets
/// differ) and tests the accuracy difference. Throws DisjointIds when no id
/// is shared and SchemaMismatch when the runs disagree on a ground-truth
/// label.
Comparison compare_documents(const ResultsDocument& a, std::string label_a, const ResultsDocument& b,
                             std::string label_b);

/// Reads both files and compares them, labelling runs by mode and file stem.
Comparison compare_runs(const std::filesystem::path& a, const std::filesystem::path& b);

/// Human-readable table with Accuracy / Precision / Recall / F1 Score
/// columns, a z-test row when comparing, and the confusion matrices.
std::string render_table(const std::vector<RunSummary>& runs, const std::optional<ZTestResult>& z_test,
                         const std::vector<std::string>& warnings = {});
std::string render_table(const Comparison& c);

/// Machine-readable form of the same report.
std::string render_json(const std::vector<RunSummary>& runs, const std::optional<ZTestResult>& z_test,
                        const std::vector<std::string>& warnings = {});

/// 2x2 matrix, rows = truth, columns = prediction, biased first.
std::string confusion_csv(const ConfusionMatrix& cm);

/// "<mode> (<file stem>)".
std::string run_label(const ResultsDocument& doc, const std::filesystem::path& path);

}  // namespace bias_audit
