#include "bias_audit/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bias_audit/errors.hpp"
#include "bias_audit/keyword.hpp"
#include "bias_audit/splitmix64.hpp"

namespace bias_audit {

std::string_view to_string(DatasetFormat f) noexcept {
  switch (f) {
    case DatasetFormat::Csv: return "csv";
    case DatasetFormat::Tsv: return "tsv";
    case DatasetFormat::Jsonl: return "jsonl";
  }
  return "?";
}

std::optional<DatasetFormat> parse_dataset_format(std::string_view s) noexcept {
  if (s == "csv") return DatasetFormat::Csv;
  if (s == "tsv") return DatasetFormat::Tsv;
  if (s == "jsonl") return DatasetFormat::Jsonl;
  return std::nullopt;
}

std::optional<DatasetFormat> format_from_extension(const std::filesystem::path& path) {
  const auto ext = to_lower_ascii(path.extension().string());
  if (ext == ".csv") return DatasetFormat::Csv;
  if (ext == ".tsv") return DatasetFormat::Tsv;
  if (ext == ".jsonl" || ext == ".ndjson") return DatasetFormat::Jsonl;
  return std::nullopt;
}

LabelMapping::LabelMapping() : entries_{{"1", BiasLabel::Biased}, {"0", BiasLabel::Unbiased}} {}

LabelMapping::LabelMapping(std::vector<std::pair<std::string, BiasLabel>> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = i + 1; j < entries_.size(); ++j) {
      if (entries_[i].first == entries_[j].first) {
        throw ConfigError("label mapping lists raw value '" + entries_[i].first + "' twice");
      }
    }
  }
}

LabelMapping LabelMapping::parse(std::string_view spec) {
  std::vector<std::pair<std::string, BiasLabel>> entries;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const auto item = trim(spec.substr(0, comma));
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("label mapping entry needs raw=label: " + std::string(item));
    const auto label = parse_bias_label(to_lower_ascii(trim(item.substr(eq + 1))));
    if (!label) throw ConfigError("label must be biased or unbiased: " + std::string(item));
    entries.emplace_back(std::string(trim(item.substr(0, eq))), *label);
  }
  if (entries.empty()) throw ConfigError("empty label mapping");
  return LabelMapping(std::move(entries));
}

std::optional<BiasLabel> LabelMapping::decode(std::string_view raw) const {
  for (const auto& [value, label] : entries_) {
    if (value == raw) return label;
  }
  return std::nullopt;
}

const std::string& LabelMapping::encode(BiasLabel label) const {
  for (const auto& [value, l] : entries_) {
    if (l == label) return value;
  }
  throw ConfigError("label mapping has no raw value for " + std::string(to_string(label)));
}

std::string LabelMapping::str() const {
  std::string out;
  for (const auto& [value, label] : entries_) {
    if (!out.empty()) out += ",";
    out += value + "=" + std::string(to_string(label));
  }
  return out;
}

bool is_integer_literal(std::string_view raw) noexcept {
  std::string_view digits = raw;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  if (digits.empty() || digits.size() > 18) return false;
  if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
    return false;
  }
  if (digits.size() > 1 && digits.front() == '0') return false;
  return !(raw.front() == '-' && digits == "0");
}

std::vector<CsvRow> parse_delimited(std::string_view text, char delimiter) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  row.line = 1;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row = CsvRow{};
    row.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // handled with the '\n'
    } else if (c == '\n') {
      ++line;
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field starting on line " + std::to_string(row.line), rows.size());
  if (field_started || !row.fields.empty()) end_row();
  return rows;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
  return text;
}

std::string raw_label(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

Statement make_statement(const DatasetConfig& config, std::size_t row, std::string text, const std::string& raw) {
  if (!valid_utf8(text)) throw ParseError("row " + std::to_string(row) + ": text is not valid UTF-8", row);
  if (!has_content(text)) throw EmptyText("row " + std::to_string(row) + ": empty text", row);
  const auto label = config.label_mapping.decode(raw);
  if (!label) {
    throw UnmappedLabel("row " + std::to_string(row) + ": label '" + raw + "' is not in the label mapping", row,
                        raw);
  }
  return Statement{row, std::move(text), *label};
}

std::vector<Statement> load_delimited(const DatasetConfig& config, const std::string& text, char delimiter) {
  auto rows = parse_delimited(text, delimiter);
  if (rows.empty()) throw ParseError("missing header row", 0);
  const auto& header = rows.front().fields;
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw ParseError("header has no column '" + name + "'", 0);
  };
  const auto text_col = column(config.text_field);
  const auto label_col = column(config.label_field);

  std::vector<Statement> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t row = r - 1;
    auto& fields = rows[r].fields;
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + " (line " + std::to_string(rows[r].line) + "): expected " +
                           std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()),
                       row);
    }
    out.push_back(make_statement(config, row, std::move(fields[text_col]), std::string(trim(fields[label_col]))));
  }
  return out;
}

std::vector<Statement> load_jsonl(const DatasetConfig& config, const std::string& text) {
  std::vector<Statement> out;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!has_content(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what(), row);
    }
    if (!j.is_object()) throw ParseError("row " + std::to_string(row) + ": not a JSON object", row);
    if (!j.contains(config.text_field) || !j[config.text_field].is_string()) {
      throw ParseError("row " + std::to_string(row) + ": missing string field '" + config.text_field + "'", row);
    }
    if (!j.contains(config.label_field) || j[config.label_field].is_null()) {
      throw ParseError("row " + std::to_string(row) + ": missing field '" + config.label_field + "'", row);
    }
    out.push_back(make_statement(config, row, j[config.text_field].get<std::string>(),
                                 raw_label(j[config.label_field])));
    ++row;
  }
  return out;
}

}  // namespace

std::vector<Statement> load_corpus(const DatasetConfig& config) {
  const std::string text = read_file(config.path);
  switch (config.format) {
    case DatasetFormat::Csv: return load_delimited(config, text, ',');
    case DatasetFormat::Tsv: return load_delimited(config, text, '\t');
    case DatasetFormat::Jsonl: return load_jsonl(config, text);
  }
  return {};
}

std::vector<Statement> sample(std::span<const Statement> statements, std::size_t k, std::uint64_t seed) {
  if (k > statements.size()) {
    throw SampleTooLarge("sample size " + std::to_string(k) + " exceeds corpus size " +
                         std::to_string(statements.size()));
  }
  std::vector<Statement> out;
  out.reserve(k);
  for (auto i : sample_indices(statements.size(), k, seed)) out.push_back(statements[i]);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::vector<Statement> select_statements(const DatasetConfig& config) {
  auto corpus = load_corpus(config);
  if (!config.sample_size) return corpus;
  return sample(corpus, *config.sample_size, config.seed);
}

void write_jsonl(std::span<const Statement> statements, const std::filesystem::path& path,
                 const DatasetConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& s : statements) {
    nlohmann::ordered_json j;
    j[config.text_field] = s.text;
    const auto& raw = config.label_mapping.encode(s.true_label);
    if (is_integer_literal(raw)) {
      j[config.label_field] = std::stoll(raw);
    } else {
      j[config.label_field] = raw;
    }
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace bias_audit
