#include "bias_audit/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "bias_audit/keyword.hpp"

namespace bias_audit {

namespace {

constexpr std::array<std::string_view, 2> kCheckerKeywords{"fact", "opinion"};
constexpr std::array<std::string_view, 2> kVerifierKeywords{"clean", "potentially_biased"};
constexpr std::array<std::string_view, 2> kValidatorKeywords{"high", "low"};
constexpr std::array<std::string_view, 2> kBaselineKeywords{"biased", "unbiased"};

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string reminder(std::span<const std::string_view> allowed) {
  std::string out = "\n\nAnswer with exactly one word: ";
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    if (i > 0) out += i + 1 == allowed.size() ? " or " : ", ";
    out += upper(allowed[i]);
  }
  out += ".";
  return out;
}

std::string describe(const Pipeline::JustificationContext& ctx) {
  std::string out = "- checker: " + upper(to_string(ctx.statement_type)) + "\n";
  if (ctx.fact_check) {
    out += "- fact verifier: " + upper(to_string(ctx.fact_check->verdict));
    if (ctx.fact_check->note) out += " (" + *ctx.fact_check->note + ")";
    out += "\n";
  }
  if (ctx.bias_level) out += "- validator bias level: " + upper(to_string(*ctx.bias_level)) + "\n";
  return out;
}

}  // namespace

std::string_view to_string(RunMode mode) noexcept {
  return mode == RunMode::Pipeline ? "pipeline" : "baseline";
}

std::optional<RunMode> parse_run_mode(std::string_view s) noexcept {
  if (s == "pipeline") return RunMode::Pipeline;
  if (s == "baseline") return RunMode::Baseline;
  return std::nullopt;
}

RouteTrace route_trace(const AnalysisRecord& record) {
  RouteTrace trace;
  for (const auto& c : record.backend_calls()) {
    if (trace.empty() || trace.back() != c.stage) trace.push_back(c.stage);
  }
  return trace;
}

bool is_legal_route(const RouteTrace& trace) {
  using enum Stage;
  static const std::array<RouteTrace, 3> kLegal{{
      {Checker, FactVerifier, Justifier},
      {Checker, FactVerifier, Validator, Justifier},
      {Checker, Validator, Justifier},
  }};
  return std::find(kLegal.begin(), kLegal.end(), trace) != kLegal.end();
}

Pipeline::Pipeline(Backend& backend, const PromptSet& prompts, PipelineOptions options)
    : backend_(backend), prompts_(prompts), options_(options) {}

BackendResponse Pipeline::call(const Statement& s, PromptKind kind, std::string prompt, int max_tokens,
                               std::vector<CallSummary>* calls) {
  const auto& tpl = prompts_.get(kind);
  BackendRequest req{s.id, tpl.stage(), std::move(prompt), tpl.content_hash(), options_.temperature, max_tokens};
  BackendResponse resp = backend_.complete(req);
  if (calls) calls->push_back(CallSummary{tpl.stage(), resp.latency_ms, resp.attempt - 1});
  return resp;
}

Pipeline::KeywordAnswer Pipeline::ask_keyword(const Statement& s, PromptKind kind,
                                              std::span<const std::string_view> allowed,
                                              std::vector<CallSummary>* calls) {
  const std::string prompt = render_prompt(prompts_.get(kind), s);
  auto first = call(s, kind, prompt, options_.keyword_max_tokens, calls);
  try {
    return {parse_keyword(first.text, allowed), std::move(first.text)};
  } catch (const Unparseable&) {
  }
  auto second = call(s, kind, prompt + reminder(allowed), options_.keyword_max_tokens, calls);
  return {parse_keyword(second.text, allowed), std::move(second.text)};
}

StatementType Pipeline::classify_statement(const Statement& s, std::vector<CallSummary>* calls) {
  const auto answer = ask_keyword(s, PromptKind::Checker, kCheckerKeywords, calls);
  return answer.keyword == "fact" ? StatementType::Fact : StatementType::Opinion;
}

FactCheckOutcome Pipeline::verify_factual_bias(const Statement& s, StatementType type,
                                               std::vector<CallSummary>* calls) {
  if (type != StatementType::Fact) throw std::logic_error("verify_factual_bias called for an opinion");
  auto answer = ask_keyword(s, PromptKind::FactVerifier, kVerifierKeywords, calls);
  FactCheckOutcome outcome;
  outcome.verdict = answer.keyword == "clean" ? FactCheckVerdict::Clean : FactCheckVerdict::PotentiallyBiased;
  const auto said = trim(answer.response);
  if (to_lower_ascii(said) != answer.keyword) outcome.note = std::string(said);
  return outcome;
}

BiasLevel Pipeline::validate_bias(const Statement& s, StatementType type,
                                  const std::optional<FactCheckOutcome>& fact_check,
                                  std::vector<CallSummary>* calls) {
  PromptKind kind = PromptKind::ValidatorOpinion;
  if (type == StatementType::Fact) {
    if (!fact_check || fact_check->verdict != FactCheckVerdict::PotentiallyBiased) {
      throw std::logic_error("validate_bias called for a fact that was not flagged");
    }
    kind = PromptKind::ValidatorFact;
  }
  const auto answer = ask_keyword(s, kind, kValidatorKeywords, calls);
  return answer.keyword == "high" ? BiasLevel::High : BiasLevel::Low;
}

Justification Pipeline::write_justification(const Statement& s, BiasLabel verdict,
                                            const JustificationContext& context,
                                            std::vector<CallSummary>* calls) {
  const PromptKind kind =
      verdict == BiasLabel::Biased ? PromptKind::JustifierBiased : PromptKind::JustifierUnbiased;
  const std::map<std::string, std::string, std::less<>> extras{
      {"verdict", verdict == BiasLabel::Biased ? "BIAS" : "NO BIAS"},
      {"analysis", describe(context)},
  };
  const std::string prompt = render_prompt(prompts_.get(kind), s, extras);
  try {
    for (int i = 0; i < 2; ++i) {
      auto resp = call(s, kind, prompt, options_.justification_max_tokens, calls);
      if (has_content(resp.text)) return {std::move(resp.text), false};
    }
  } catch (const MissingTranscript&) {
    throw;
  } catch (const BackendError&) {
  }
  return {std::string(kJustificationUnavailable), true};
}

StatementOutcome<AnalysisRecord> Pipeline::run_pipeline_one(const Statement& s) {
  AnalysisRecord::Fields f;
  f.statement = s;
  Stage stage = Stage::Checker;
  try {
    f.statement_type = classify_statement(s, &f.backend_calls);
    bool needs_validation = f.statement_type == StatementType::Opinion;
    if (f.statement_type == StatementType::Fact) {
      stage = Stage::FactVerifier;
      f.fact_check = verify_factual_bias(s, f.statement_type, &f.backend_calls);
      needs_validation = f.fact_check->verdict == FactCheckVerdict::PotentiallyBiased;
    }
    if (needs_validation) {
      stage = Stage::Validator;
      f.bias_level = validate_bias(s, f.statement_type, f.fact_check, &f.backend_calls);
    }
    f.predicted_label = label_from_bias_level(f.bias_level);
    stage = Stage::Justifier;
    auto j = write_justification(s, f.predicted_label, {f.statement_type, f.fact_check, f.bias_level},
                                 &f.backend_calls);
    f.justification = std::move(j.text);
    f.degraded = j.degraded;
  } catch (const Unparseable& e) {
    return StatementFailure{s.id, stage, "unparseable", std::string(e.what()) + ": \"" + e.response() + "\""};
  } catch (const MissingTranscript&) {
    throw;
  } catch (const BackendError& e) {
    return StatementFailure{s.id, stage, e.kind(), e.what()};
  }
  return AnalysisRecord(std::move(f));
}

StatementOutcome<BaselineRecord> Pipeline::run_baseline_one(const Statement& s) {
  try {
    auto answer = ask_keyword(s, PromptKind::Baseline, kBaselineKeywords, nullptr);
    const auto label = answer.keyword == "biased" ? BiasLabel::Biased : BiasLabel::Unbiased;
    return BaselineRecord(s, std::move(answer.response), label);
  } catch (const Unparseable& e) {
    return StatementFailure{s.id, Stage::Baseline, "unparseable",
                            std::string(e.what()) + ": \"" + e.response() + "\""};
  } catch (const MissingTranscript&) {
    throw;
  } catch (const BackendError& e) {
    return StatementFailure{s.id, Stage::Baseline, e.kind(), e.what()};
  }
}

RunResults run_batch(std::span<const Statement> statements, RunMode mode, Pipeline& pipeline,
                     std::size_t concurrency) {
  if (concurrency == 0) throw std::invalid_argument("concurrency must be at least 1");

  using Slot = std::variant<std::monostate, AnalysisRecord, BaselineRecord, StatementFailure>;
  std::vector<Slot> slots(statements.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t i = next++; i < statements.size(); i = next++) {
      try {
        if (mode == RunMode::Pipeline) {
          std::visit([&](auto&& v) { slots[i] = std::move(v); }, pipeline.run_pipeline_one(statements[i]));
        } else {
          std::visit([&](auto&& v) { slots[i] = std::move(v); }, pipeline.run_baseline_one(statements[i]));
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = statements.size();
      }
    }
  };

  const std::size_t n_threads = std::min(concurrency, std::max<std::size_t>(statements.size(), 1));
  {
    std::vector<std::jthread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<std::size_t> order(statements.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return statements[a].id < statements[b].id; });

  RunResults out;
  out.mode = mode;
  for (std::size_t i : order) {
    auto& slot = slots[i];
    if (auto* a = std::get_if<AnalysisRecord>(&slot)) out.analyses.push_back(std::move(*a));
    if (auto* b = std::get_if<BaselineRecord>(&slot)) out.baselines.push_back(std::move(*b));
    if (auto* f = std::get_if<StatementFailure>(&slot)) out.failures.push_back(std::move(*f));
  }
  return out;
}

}  // namespace bias_audit
