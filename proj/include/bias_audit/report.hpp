#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "bias_audit/dataset.hpp"
#include "bias_audit/pipeline.hpp"

namespace bias_audit {

inline constexpr int kResultsSchemaVersion = 1;

/// Everything needed to reproduce a results file from its transcript.
/// Runtime knobs that cannot change the output (concurrency, failure
/// threshold, output paths) are deliberately absent.
struct RunManifest {
  RunMode mode = RunMode::Pipeline;
  std::string backend_id;
  std::string model;
  std::uint64_t seed = 0;
  /// nullopt means the whole corpus was used.
  std::optional<std::size_t> sample_size;
  std::string dataset_path;
  std::string dataset_sha256;
  DatasetFormat dataset_format = DatasetFormat::Jsonl;
  std::string text_field = "text";
  std::string label_field = "label";
  std::size_t corpus_size = 0;
  LabelMapping label_mapping;
  /// Template directory, empty for the built-in templates.
  std::optional<std::string> templates_dir;
  /// Template kind ("checker", ...) → SHA-256 of its body.
  std::map<std::string, std::string> prompt_hashes;
  double temperature = 0.0;
  int max_retries = 0;
  std::string tool_version;
  std::string started_at;
  std::string finished_at;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

struct ResultsDocument {
  RunManifest manifest;
  RunResults results;

  friend bool operator==(const ResultsDocument&, const ResultsDocument&) = default;
};

/// Canonical text of a results file: 2-space indented JSON with a fixed
/// key order, UTF-8, trailing newline. Pipeline records carry
/// id, text, true_label, predicted_label, statement_type,
/// analysis {fact_check, bias_score, justification, degraded} and
/// backend_calls; baseline records carry id, text, true_label,
/// predicted_label, raw_response. Labels are written in the dataset's raw
/// encoding (a JSON integer when the raw value is an integer literal).
std::string serialize_results(const ResultsDocument& doc);

/// Parses and validates a results document. Throws SchemaError naming the
/// offending JSON path.
ResultsDocument parse_results(std::string_view text);

/// Writes serialize_results(doc). Throws IoError.
void write_results(const ResultsDocument& doc, const std::filesystem::path& path);

/// Throws IoError or SchemaError.
ResultsDocument read_results(const std::filesystem::path& path);

/// UTC timestamp "YYYY-MM-DDTHH:MM:SSZ". Honours SOURCE_DATE_EPOCH when set
/// so reproducible runs produce identical manifests.
std::string utc_timestamp_now();

}  // namespace bias_audit
