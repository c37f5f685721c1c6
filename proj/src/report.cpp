#include "bias_audit/report.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bias_audit/errors.hpp"

namespace bias_audit {

using ojson = nlohmann::ordered_json;

namespace {

ojson label_value(const LabelMapping& mapping, BiasLabel label) {
  const auto& raw = mapping.encode(label);
  if (is_integer_literal(raw)) return std::stoll(raw);
  return raw;
}

ojson optional_string(const std::optional<std::string>& s) { return s ? ojson(*s) : ojson(nullptr); }

ojson manifest_json(const RunManifest& m) {
  ojson j;
  j["mode"] = to_string(m.mode);
  j["backend"] = {{"id", m.backend_id}, {"model", m.model}};
  j["seed"] = m.seed;
  j["sample_size"] = m.sample_size ? ojson(*m.sample_size) : ojson("all");
  j["dataset"] = {{"path", m.dataset_path},
                  {"sha256", m.dataset_sha256},
                  {"format", to_string(m.dataset_format)},
                  {"text_field", m.text_field},
                  {"label_field", m.label_field},
                  {"corpus_size", m.corpus_size}};
  ojson mapping = ojson::object();
  for (const auto& [raw, label] : m.label_mapping.entries()) mapping[raw] = to_string(label);
  j["label_mapping"] = mapping;
  ojson hashes = ojson::object();
  for (const auto& [kind, hash] : m.prompt_hashes) hashes[kind] = hash;
  j["prompt_templates"] = {{"dir", optional_string(m.templates_dir)}, {"sha256", hashes}};
  j["temperature"] = m.temperature;
  j["max_retries"] = m.max_retries;
  j["tool_version"] = m.tool_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  return j;
}

ojson analysis_json(const AnalysisRecord& r, const LabelMapping& mapping) {
  const auto& s = r.statement();
  ojson j;
  j["id"] = s.id;
  j["text"] = s.text;
  j["true_label"] = label_value(mapping, s.true_label);
  j["predicted_label"] = label_value(mapping, r.predicted_label());
  j["statement_type"] = to_string(r.statement_type());
  ojson fact_check = nullptr;
  if (r.fact_check()) {
    fact_check = {{"outcome", to_string(r.fact_check()->verdict)}, {"note", optional_string(r.fact_check()->note)}};
  }
  j["analysis"] = {{"fact_check", fact_check},
                   {"bias_score", r.bias_level() ? ojson(to_string(*r.bias_level())) : ojson(nullptr)},
                   {"justification", r.justification()},
                   {"degraded", r.degraded()}};
  ojson calls = ojson::array();
  for (const auto& c : r.backend_calls()) {
    calls.push_back({{"stage", to_string(c.stage)}, {"latency_ms", c.latency_ms}, {"retries", c.retries}});
  }
  j["backend_calls"] = calls;
  return j;
}

ojson baseline_json(const BaselineRecord& r, const LabelMapping& mapping) {
  const auto& s = r.statement();
  ojson j;
  j["id"] = s.id;
  j["text"] = s.text;
  j["true_label"] = label_value(mapping, s.true_label);
  j["predicted_label"] = label_value(mapping, r.predicted_label());
  j["raw_response"] = r.raw_response();
  return j;
}

// -- reading -----------------------------------------------------------------

using json = nlohmann::ordered_json;

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const { throw SchemaError(path_, msg); }

  Reader at(const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    auto it = j_.find(key);
    const std::string child = path_.empty() ? key : path_ + "." + key;
    if (it == j_.end()) throw SchemaError(child, "missing field");
    return Reader(*it, child);
  }
  Reader at(std::size_t i) const { return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
  bool is_null() const { return j_.is_null(); }
  std::size_t size() const { return j_.size(); }
  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  std::optional<std::string> opt_str() const {
    if (j_.is_null()) return std::nullopt;
    return str();
  }
  std::uint64_t u64() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return j_.get<std::uint64_t>();
  }
  int integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<int>();
  }
  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected a boolean");
    return j_.get<bool>();
  }
  const json& array() const {
    if (!j_.is_array()) fail("expected an array");
    return j_;
  }
  const json& object() const {
    if (!j_.is_object()) fail("expected an object");
    return j_;
  }

  template <typename E, typename Parse>
  E enumeration(Parse parse) const {
    const auto s = str();
    auto v = parse(s);
    if (!v) fail("unknown value '" + s + "'");
    return *v;
  }

 private:
  const json& j_;
  std::string path_;
};

std::string raw_label_text(const Reader& r) {
  const auto& j = r.raw();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.dump();
  r.fail("expected an integer or string label");
}

BiasLabel read_label(const Reader& r, const LabelMapping& mapping) {
  const auto raw = raw_label_text(r);
  auto label = mapping.decode(raw);
  if (!label) r.fail("label '" + raw + "' is not in the manifest's label_mapping");
  return *label;
}

RunManifest read_manifest(const Reader& m) {
  RunManifest out;
  m.object();
  out.mode = m.at("mode").enumeration<RunMode>(parse_run_mode);
  out.backend_id = m.at("backend").at("id").str();
  out.model = m.at("backend").at("model").str();
  out.seed = m.at("seed").u64();
  const auto size = m.at("sample_size");
  if (size.raw().is_string()) {
    if (size.str() != "all") size.fail("expected a count or \"all\"");
  } else {
    out.sample_size = size.u64();
  }
  const auto ds = m.at("dataset");
  out.dataset_path = ds.at("path").str();
  out.dataset_sha256 = ds.at("sha256").str();
  out.dataset_format = ds.at("format").enumeration<DatasetFormat>(parse_dataset_format);
  out.text_field = ds.at("text_field").str();
  out.label_field = ds.at("label_field").str();
  out.corpus_size = ds.at("corpus_size").u64();

  const auto lm = m.at("label_mapping");
  std::vector<std::pair<std::string, BiasLabel>> entries;
  for (const auto& [raw, label] : lm.object().items()) {
    entries.emplace_back(raw, Reader(label, lm.path() + "." + raw).enumeration<BiasLabel>(parse_bias_label));
  }
  try {
    out.label_mapping = LabelMapping(std::move(entries));
  } catch (const ConfigError& e) {
    lm.fail(e.what());
  }

  const auto pt = m.at("prompt_templates");
  out.templates_dir = pt.at("dir").opt_str();
  const auto hashes = pt.at("sha256");
  for (const auto& [kind, hash] : hashes.object().items()) {
    out.prompt_hashes.emplace(kind, Reader(hash, hashes.path() + "." + kind).str());
  }
  out.temperature = m.at("temperature").number();
  out.max_retries = m.at("max_retries").integer();
  out.tool_version = m.at("tool_version").str();
  out.started_at = m.at("started_at").str();
  out.finished_at = m.at("finished_at").str();
  return out;
}

AnalysisRecord read_analysis(const Reader& r, const LabelMapping& mapping) {
  AnalysisRecord::Fields f;
  f.statement.id = r.at("id").u64();
  f.statement.text = r.at("text").str();
  f.statement.true_label = read_label(r.at("true_label"), mapping);
  f.predicted_label = read_label(r.at("predicted_label"), mapping);
  f.statement_type = r.at("statement_type").enumeration<StatementType>(parse_statement_type);
  const auto a = r.at("analysis");
  const auto fc = a.at("fact_check");
  if (!fc.is_null()) {
    FactCheckOutcome o;
    o.verdict = fc.at("outcome").enumeration<FactCheckVerdict>(parse_fact_check_verdict);
    o.note = fc.at("note").opt_str();
    f.fact_check = o;
  }
  const auto bs = a.at("bias_score");
  if (!bs.is_null()) f.bias_level = bs.enumeration<BiasLevel>(parse_bias_level);
  f.justification = a.at("justification").str();
  f.degraded = a.at("degraded").boolean();
  const auto calls = r.at("backend_calls");
  calls.array();
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const auto c = calls.at(i);
    f.backend_calls.push_back(CallSummary{c.at("stage").enumeration<Stage>(parse_stage), c.at("latency_ms").number(),
                                          c.at("retries").integer()});
  }
  try {
    return AnalysisRecord(std::move(f));
  } catch (const InvariantViolation& e) {
    r.fail(e.what());
  }
}

BaselineRecord read_baseline(const Reader& r, const LabelMapping& mapping) {
  Statement s{r.at("id").u64(), r.at("text").str(), read_label(r.at("true_label"), mapping)};
  const auto predicted = read_label(r.at("predicted_label"), mapping);
  try {
    return BaselineRecord(std::move(s), r.at("raw_response").str(), predicted);
  } catch (const InvariantViolation& e) {
    r.fail(e.what());
  }
}

}  // namespace

std::string serialize_results(const ResultsDocument& doc) {
  const auto& mapping = doc.manifest.label_mapping;
  ojson j;
  j["schema_version"] = kResultsSchemaVersion;
  j["manifest"] = manifest_json(doc.manifest);
  ojson results = ojson::array();
  if (doc.results.mode == RunMode::Pipeline) {
    for (const auto& r : doc.results.analyses) results.push_back(analysis_json(r, mapping));
  } else {
    for (const auto& r : doc.results.baselines) results.push_back(baseline_json(r, mapping));
  }
  j["results"] = std::move(results);
  ojson failures = ojson::array();
  for (const auto& f : doc.results.failures) {
    failures.push_back({{"id", f.id}, {"stage", to_string(f.stage)}, {"kind", f.kind}, {"message", f.message}});
  }
  j["failures"] = std::move(failures);
  return j.dump(2) + "\n";
}

ResultsDocument parse_results(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("not valid JSON: ") + e.what());
  }
  const Reader root(j, "");
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  const auto version = root.at("schema_version").integer();
  if (version != kResultsSchemaVersion) {
    throw SchemaError("schema_version", "unsupported version " + std::to_string(version));
  }
  ResultsDocument doc;
  doc.manifest = read_manifest(root.at("manifest"));
  doc.results.mode = doc.manifest.mode;
  const auto& mapping = doc.manifest.label_mapping;

  const auto results = root.at("results");
  results.array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (doc.manifest.mode == RunMode::Pipeline) {
      doc.results.analyses.push_back(read_analysis(results.at(i), mapping));
    } else {
      doc.results.baselines.push_back(read_baseline(results.at(i), mapping));
    }
  }
  const auto failures = root.at("failures");
  failures.array();
  for (std::size_t i = 0; i < failures.size(); ++i) {
    const auto f = failures.at(i);
    doc.results.failures.push_back(StatementFailure{f.at("id").u64(), f.at("stage").enumeration<Stage>(parse_stage),
                                                    f.at("kind").str(), f.at("message").str()});
  }
  return doc;
}

void write_results(const ResultsDocument& doc, const std::filesystem::path& path) {
  const auto text = serialize_results(doc);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

ResultsDocument read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_results(ss.str());
}

std::string utc_timestamp_now() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace bias_audit
