#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bias_audit/domain.hpp"

namespace bias_audit {

enum class DatasetFormat { Csv, Tsv, Jsonl };

std::string_view to_string(DatasetFormat f) noexcept;
std::optional<DatasetFormat> parse_dataset_format(std::string_view s) noexcept;
/// Guess from the extension: .csv, .tsv, .jsonl / .ndjson.
std::optional<DatasetFormat> format_from_extension(const std::filesystem::path& path);

/// Raw label values as they appear in a corpus, mapped to labels. Order is
/// significant: the first raw value listed for a label is the one written
/// back into result files.
class LabelMapping {
 public:
  /// {"1" → Biased, "0" → Unbiased}.
  LabelMapping();
  explicit LabelMapping(std::vector<std::pair<std::string, BiasLabel>> entries);

  /// Parses "1=biased,0=unbiased". Throws ConfigError.
  static LabelMapping parse(std::string_view spec);

  std::optional<BiasLabel> decode(std::string_view raw) const;
  /// Throws ConfigError if no raw value maps to `label`.
  const std::string& encode(BiasLabel label) const;
  const std::vector<std::pair<std::string, BiasLabel>>& entries() const noexcept { return entries_; }
  std::string str() const;

  friend bool operator==(const LabelMapping&, const LabelMapping&) = default;

 private:
  std::vector<std::pair<std::string, BiasLabel>> entries_;
};

struct DatasetConfig {
  std::filesystem::path path;
  DatasetFormat format = DatasetFormat::Jsonl;
  std::string text_field = "text";
  std::string label_field = "label";
  LabelMapping label_mapping;
  /// nullopt means the whole corpus.
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 42;
};

/// One Statement per data row, ids 0..n-1 in file order. CSV/TSV need a
/// header row and follow RFC 4180 quoting. JSON Lines skip blank lines.
/// Throws ParseError, UnmappedLabel or EmptyText carrying the data row, or
/// IoError.
std::vector<Statement> load_corpus(const DatasetConfig& config);

/// Deterministic selection of `k` statements by position (see
/// sample_indices), returned in ascending id order. Throws SampleTooLarge if
/// k exceeds the corpus.
std::vector<Statement> sample(std::span<const Statement> statements, std::size_t k, std::uint64_t seed);

/// load_corpus then sample per the config.
std::vector<Statement> select_statements(const DatasetConfig& config);

/// Writes statements as JSON Lines using the config's field names and the
/// mapping's canonical raw labels.
void write_jsonl(std::span<const Statement> statements, const std::filesystem::path& path,
                 const DatasetConfig& config);

/// True when `raw` is a canonical decimal integer ("0", "17", "-3") that
/// survives a round trip through a JSON number.
bool is_integer_literal(std::string_view raw) noexcept;

/// RFC 4180 reader. Returns rows of fields plus the 1-based line each row
/// starts on. Throws ParseError on an unterminated quote.
struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;
};
std::vector<CsvRow> parse_delimited(std::string_view text, char delimiter);

}  // namespace bias_audit
