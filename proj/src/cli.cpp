#include "bias_audit/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bias_audit/compare.hpp"
#include "bias_audit/dataset.hpp"
#include "bias_audit/errors.hpp"
#include "bias_audit/http_backend.hpp"
#include "bias_audit/keyword.hpp"
#include "bias_audit/pipeline.hpp"
#include "bias_audit/report.hpp"
#include "bias_audit/scripted_backend.hpp"
#include "bias_audit/sha256.hpp"
#include "bias_audit/transcript.hpp"
#include "bias_audit/version.hpp"

namespace bias_audit::cli {

namespace {

namespace fs = std::filesystem;

struct RunFlags {
  std::string mode = "pipeline";
  std::string dataset;
  std::string format;
  std::string text_field = "text";
  std::string label_field = "label";
  std::string label_map = "1=biased,0=unbiased";
  std::string sample_size = "all";
  std::uint64_t seed = 42;
  std::string backend;
  std::string base_url;
  std::string templates;
  std::size_t concurrency = 8;
  double max_failures = 0.01;
  int max_retries = 3;
  double rpm = 0.0;
  double timeout_s = 60.0;
  double temperature = 0.0;
  std::string out;
  std::string transcript;
  std::string config;
};

struct MetricsFlags {
  std::string results;
  std::string compare;
  std::string json_out;
  std::string confusion_prefix;
};

struct ReplayFlags {
  std::string results;
  std::string transcript;
  std::string dataset;
  std::string templates;
};

std::optional<std::size_t> parse_sample_size(const std::string& s) {
  if (s == "all") return std::nullopt;
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ConfigError("--sample-size must be a non-negative integer or \"all\", got \"" + s + "\"");
  }
  return static_cast<std::size_t>(std::stoull(s));
}

DatasetFormat resolve_format(const std::string& flag, const fs::path& path) {
  if (!flag.empty()) {
    auto f = parse_dataset_format(flag);
    if (!f) throw ConfigError("unknown dataset format \"" + flag + "\" (expected csv, tsv or jsonl)");
    return *f;
  }
  auto f = format_from_extension(path);
  if (!f) throw ConfigError("cannot infer the format of " + path.string() + "; pass --format");
  return *f;
}

/// Statements selected by `config`, plus the size of the whole corpus.
std::pair<std::vector<Statement>, std::size_t> load_selection(const DatasetConfig& config) {
  auto corpus = load_corpus(config);
  const std::size_t size = corpus.size();
  if (!config.sample_size) return {std::move(corpus), size};
  return {sample(corpus, *config.sample_size, config.seed), size};
}

PromptSet load_prompts(const std::string& dir) { return dir.empty() ? PromptSet::builtin() : PromptSet::load(dir); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

int cmd_run(const RunFlags& f, std::ostream& out, std::ostream& err) {
  const auto mode = parse_run_mode(f.mode);
  if (!mode) throw ConfigError("--mode must be pipeline or baseline");
  if (f.concurrency == 0) throw ConfigError("--concurrency must be at least 1");
  if (f.max_retries < 0) throw ConfigError("--max-retries must be non-negative");

  DatasetConfig dc;
  dc.path = f.dataset;
  dc.format = resolve_format(f.format, dc.path);
  dc.text_field = f.text_field;
  dc.label_field = f.label_field;
  dc.label_mapping = LabelMapping::parse(f.label_map);
  dc.sample_size = parse_sample_size(f.sample_size);
  dc.seed = f.seed;

  const auto spec = parse_backend_spec(f.backend);
  std::unique_ptr<Backend> backend;
  std::string model;
  switch (spec.kind) {
    case BackendSpec::Kind::Scripted:
      backend = ScriptedBackend::from_file(spec.target);
      break;
    case BackendSpec::Kind::Replay:
      backend = std::make_unique<ReplayBackend>(Transcript::load(spec.target));
      break;
    case BackendSpec::Kind::Provider: {
      auto pc = resolve_provider(spec, f.base_url.empty() ? std::nullopt : std::optional(f.base_url));
      pc.retry.max_retries = f.max_retries;
      pc.timeout = std::chrono::milliseconds(static_cast<long long>(f.timeout_s * 1000.0));
      pc.requests_per_minute = f.rpm;
      model = pc.model;
      backend = std::make_unique<HttpChatBackend>(std::move(pc));
      break;
    }
  }

  const PromptSet prompts = load_prompts(f.templates);
  auto [statements, corpus_size] = load_selection(dc);

  Transcript transcript;
  std::unique_ptr<RecordingBackend> recorder;
  Backend* active = backend.get();
  if (!f.transcript.empty()) {
    recorder = std::make_unique<RecordingBackend>(*backend, transcript);
    active = recorder.get();
  }

  PipelineOptions options;
  options.temperature = f.temperature;
  Pipeline pipeline(*active, prompts, options);

  RunManifest m;
  m.mode = *mode;
  m.backend_id = spec.str();
  m.model = model;
  m.seed = dc.seed;
  m.sample_size = dc.sample_size;
  m.dataset_path = f.dataset;
  m.dataset_sha256 = sha256_file_hex(dc.path);
  m.dataset_format = dc.format;
  m.text_field = dc.text_field;
  m.label_field = dc.label_field;
  m.corpus_size = corpus_size;
  m.label_mapping = dc.label_mapping;
  if (!f.templates.empty()) m.templates_dir = f.templates;
  m.prompt_hashes = prompts.hashes();
  m.temperature = f.temperature;
  m.max_retries = f.max_retries;
  m.tool_version = kToolVersion;
  m.started_at = utc_timestamp_now();

  auto results = run_batch(statements, *mode, pipeline, f.concurrency);
  m.finished_at = utc_timestamp_now();

  const ResultsDocument doc{std::move(m), std::move(results)};
  write_results(doc, f.out);
  if (!f.transcript.empty()) transcript.save(f.transcript);

  const auto& r = doc.results;
  out << "scored " << r.scored() << ", failed " << r.failures.size() << ", wrote " << f.out << "\n";
  if (r.failure_fraction() > f.max_failures) {
    err << "failure fraction " << r.failure_fraction() << " exceeds --max-failures " << f.max_failures << "\n";
    for (const auto& fl : r.failures) {
      err << "  statement " << fl.id << " (" << to_string(fl.stage) << ", " << fl.kind << "): " << fl.message
          << "\n";
    }
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_metrics(const MetricsFlags& f, std::ostream& out, std::ostream& err) {
  const auto doc = read_results(f.results);
  std::vector<RunSummary> runs;
  std::optional<ZTestResult> z;
  std::vector<std::string> warnings;
  if (f.compare.empty()) {
    runs.push_back(summarize(doc, run_label(doc, f.results)));
  } else {
    const auto other = read_results(f.compare);
    auto c = compare_documents(doc, run_label(doc, f.results), other, run_label(other, f.compare));
    runs = {c.a, c.b};
    z = c.z_test;
    warnings = std::move(c.warnings);
  }
  out << render_table(runs, z, warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";

  if (!f.json_out.empty()) {
    write_file(f.json_out, render_json(runs, z, warnings));
    out << "wrote " << f.json_out << "\n";
  }
  if (!f.confusion_prefix.empty()) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string suffix = runs.size() == 1 ? "" : (i == 0 ? "_a" : "_b");
      const std::string path = f.confusion_prefix + suffix + ".csv";
      write_file(path, confusion_csv(runs[i].confusion));
      out << "wrote " << path << "\n";
    }
  }
  return kExitOk;
}

using ojson = nlohmann::ordered_json;

void diff_values(const ojson& a, const ojson& b, const std::string& path, std::vector<std::string>& lines) {
  if (a.is_object() && b.is_object()) {
    for (const auto& [k, v] : a.items()) {
      const std::string sub = path.empty() ? k : path + "." + k;
      if (b.contains(k)) {
        diff_values(v, b.at(k), sub, lines);
      } else {
        lines.push_back(sub + ": " + v.dump() + " -> <absent>");
      }
    }
    for (const auto& [k, v] : b.items()) {
      if (!a.contains(k)) lines.push_back((path.empty() ? k : path + "." + k) + ": <absent> -> " + v.dump());
    }
    return;
  }
  if (a.is_array() && b.is_array()) {
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::string sub = path + "[" + std::to_string(i) + "]";
      if (i >= a.size()) {
        lines.push_back(sub + ": <absent> -> " + b[i].dump());
      } else if (i >= b.size()) {
        lines.push_back(sub + ": " + a[i].dump() + " -> <absent>");
      } else {
        diff_values(a[i], b[i], sub, lines);
      }
    }
    return;
  }
  if (a != b) lines.push_back(path + ": " + a.dump() + " -> " + b.dump());
}

/// Field-level differences between two results documents. Records and
/// failures are matched by statement id so one changed outcome does not
/// shift every later index.
std::vector<std::string> diff_results(const std::string& recorded, const std::string& replayed) {
  const auto a = ojson::parse(recorded);
  const auto b = ojson::parse(replayed);
  std::vector<std::string> lines;
  for (const auto& [k, v] : a.items()) {
    if (k == "results" || k == "failures") continue;
    diff_values(v, b.contains(k) ? b.at(k) : ojson(), k, lines);
  }
  for (const char* section : {"results", "failures"}) {
    std::map<std::uint64_t, const ojson*> left;
    std::map<std::uint64_t, const ojson*> right;
    for (const auto& e : a.at(section)) left[e.at("id").get<std::uint64_t>()] = &e;
    for (const auto& e : b.at(section)) right[e.at("id").get<std::uint64_t>()] = &e;
    std::vector<std::uint64_t> ids;
    for (const auto& [id, _] : left) ids.push_back(id);
    for (const auto& [id, _] : right) {
      if (!left.count(id)) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    for (auto id : ids) {
      const std::string prefix = "statement " + std::to_string(id) + ": " + section;
      auto l = left.find(id);
      auto r = right.find(id);
      if (r == right.end()) {
        lines.push_back(prefix + ": present in recorded file, absent in replay");
      } else if (l == left.end()) {
        lines.push_back(prefix + ": absent in recorded file, present in replay");
      } else {
        std::vector<std::string> sub;
        diff_values(*l->second, *r->second, "", sub);
        for (auto& s : sub) lines.push_back(prefix + "." + s);
      }
    }
  }
  return lines;
}

int cmd_replay(const ReplayFlags& f, std::ostream& out, std::ostream& err) {
  const std::string recorded = read_file(f.results);
  const auto doc = parse_results(recorded);
  const auto& m = doc.manifest;

  DatasetConfig dc;
  dc.path = f.dataset.empty() ? fs::path(m.dataset_path) : fs::path(f.dataset);
  dc.format = m.dataset_format;
  dc.text_field = m.text_field;
  dc.label_field = m.label_field;
  dc.label_mapping = m.label_mapping;
  dc.sample_size = m.sample_size;
  dc.seed = m.seed;
  if (sha256_file_hex(dc.path) != m.dataset_sha256) {
    throw ConfigError("dataset " + dc.path.string() + " does not match the digest recorded in the manifest");
  }

  const std::string tpl_dir = !f.templates.empty() ? f.templates : m.templates_dir.value_or("");
  const PromptSet prompts = load_prompts(tpl_dir);
  const auto hashes = prompts.hashes();
  for (const auto& [kind, hash] : m.prompt_hashes) {
    auto it = hashes.find(kind);
    if (it == hashes.end() || it->second != hash) {
      throw ConfigError("template \"" + kind + "\" does not match the hash recorded in the manifest");
    }
  }

  auto [statements, corpus_size] = load_selection(dc);
  (void)corpus_size;
  ReplayBackend backend(Transcript::load(f.transcript), m.backend_id);
  PipelineOptions options;
  options.temperature = m.temperature;
  Pipeline pipeline(backend, prompts, options);
  auto results = run_batch(statements, m.mode, pipeline, 1);

  const std::string replayed = serialize_results(ResultsDocument{m, std::move(results)});
  if (replayed == recorded) {
    out << "replay matches " << f.results << "\n";
    return kExitOk;
  }
  auto lines = diff_results(recorded, replayed);
  if (lines.empty()) lines.push_back("formatting differs (no field-level change)");
  err << "replay diverged from " << f.results << ":\n";
  constexpr std::size_t kMaxLines = 50;
  for (std::size_t i = 0; i < std::min(lines.size(), kMaxLines); ++i) err << "  " << lines[i] << "\n";
  if (lines.size() > kMaxLines) err << "  ... " << (lines.size() - kMaxLines) << " more\n";
  return kExitFailure;
}

/// Inserts config-file tokens directly after the `run` subcommand so that
/// explicit flags, which come later, take precedence.
std::vector<std::string> splice_config(const std::vector<std::string>& args) {
  auto run_it = std::find(args.begin(), args.end(), "run");
  if (run_it == args.end()) return args;
  std::string path;
  for (auto it = run_it + 1; it != args.end(); ++it) {
    if (*it == "--config" && it + 1 != args.end()) path = *(it + 1);
    if (it->rfind("--config=", 0) == 0) path = it->substr(9);
  }
  if (path.empty()) return args;
  auto tokens = config_file_tokens(path);
  std::vector<std::string> out(args.begin(), run_it + 1);
  out.insert(out.end(), tokens.begin(), tokens.end());
  out.insert(out.end(), run_it + 1, args.end());
  return out;
}

}  // namespace

std::vector<std::string> config_file_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::vector<std::string> tokens;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (key == "config") continue;
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statement bias auditing: multi-agent pipeline, zero-shot baseline, metrics and replay",
               "bias_audit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "Classify a dataset and write a results file");
  run_cmd->add_option("--mode", rf.mode, "pipeline or baseline")->capture_default_str();
  run_cmd->add_option("--dataset", rf.dataset, "CSV, TSV or JSON Lines corpus")->required();
  run_cmd->add_option("--format", rf.format, "csv, tsv or jsonl (default: from the extension)");
  run_cmd->add_option("--text-field", rf.text_field)->capture_default_str();
  run_cmd->add_option("--label-field", rf.label_field)->capture_default_str();
  run_cmd->add_option("--label-map", rf.label_map, "raw=label pairs")->capture_default_str();
  run_cmd->add_option("--sample-size", rf.sample_size, "N or all")->capture_default_str();
  run_cmd->add_option("--seed", rf.seed)->capture_default_str();
  run_cmd->add_option("--backend", rf.backend, "scripted:<file>, replay:<transcript> or <provider>:<model>")
      ->required();
  run_cmd->add_option("--base-url", rf.base_url, "override the provider endpoint root");
  run_cmd->add_option("--templates", rf.templates, "directory of prompt templates");
  run_cmd->add_option("--concurrency", rf.concurrency, "statements in flight")->capture_default_str();
  run_cmd->add_option("--max-failures", rf.max_failures, "tolerated failure fraction")->capture_default_str();
  run_cmd->add_option("--max-retries", rf.max_retries)->capture_default_str();
  run_cmd->add_option("--rpm", rf.rpm, "requests per minute, 0 = unlimited")->capture_default_str();
  run_cmd->add_option("--timeout", rf.timeout_s, "per-request timeout in seconds")->capture_default_str();
  run_cmd->add_option("--temperature", rf.temperature)->capture_default_str();
  run_cmd->add_option("--out", rf.out, "results file")->required();
  run_cmd->add_option("--transcript", rf.transcript, "record backend exchanges here");
  run_cmd->add_option("--config", rf.config, "key = value file; flags on the command line win");

  MetricsFlags mf;
  auto* metrics_cmd = app.add_subcommand("metrics", "Score a results file, optionally against another");
  metrics_cmd->add_option("results", mf.results)->required();
  metrics_cmd->add_option("--compare", mf.compare, "second results file; adds the z-test");
  metrics_cmd->add_option("--json", mf.json_out, "write the report as JSON");
  metrics_cmd->add_option("--confusion-csv", mf.confusion_prefix, "write confusion matrices to PREFIX*.csv");

  ReplayFlags pf;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a results file from its transcript and compare bytes");
  replay_cmd->add_option("--results", pf.results)->required();
  replay_cmd->add_option("--transcript", pf.transcript)->required();
  replay_cmd->add_option("--dataset", pf.dataset, "override the dataset path in the manifest");
  replay_cmd->add_option("--templates", pf.templates, "override the template directory in the manifest");

  std::string templates_out;
  auto* templates_cmd = app.add_subcommand("templates", "Write the built-in prompt templates");
  templates_cmd->add_option("--out", templates_out)->required();

  std::vector<std::string> args;
  try {
    args = splice_config(raw_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(rf, out, err);
    if (*metrics_cmd) return cmd_metrics(mf, out, err);
    if (*replay_cmd) return cmd_replay(pf, out, err);
    PromptSet::builtin().write_to(templates_out);
    out << "wrote " << kAllPromptKinds.size() << " templates to " << templates_out << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitConfig;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace bias_audit::cli
