#include "bias_audit/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "bias_audit/errors.hpp"
#include "bias_audit/keyword.hpp"

namespace bias_audit {

BiasLabel label_from_bias_level(std::optional<BiasLevel> level) noexcept {
  return level == BiasLevel::High ? BiasLabel::Biased : BiasLabel::Unbiased;
}

AnalysisRecord::AnalysisRecord(Fields fields) : f_(std::move(fields)) {
  const bool is_fact = f_.statement_type == StatementType::Fact;
  if (is_fact != f_.fact_check.has_value()) {
    throw InvariantViolation(is_fact ? "fact statement without a fact check"
                                     : "opinion statement carries a fact check");
  }
  const bool validator_ran =
      !is_fact || f_.fact_check->verdict == FactCheckVerdict::PotentiallyBiased;
  if (validator_ran != f_.bias_level.has_value()) {
    throw InvariantViolation(validator_ran ? "validated statement without a bias level"
                                           : "clean fact carries a bias level");
  }
  if (f_.predicted_label != label_from_bias_level(f_.bias_level)) {
    throw InvariantViolation("predicted label disagrees with bias level");
  }
  if (!has_content(f_.justification)) {
    throw InvariantViolation("empty justification");
  }
}

bool operator==(const AnalysisRecord& a, const AnalysisRecord& b) {
  const auto& x = a.f_;
  const auto& y = b.f_;
  return x.statement == y.statement && x.statement_type == y.statement_type &&
         x.fact_check == y.fact_check && x.bias_level == y.bias_level &&
         x.justification == y.justification && x.predicted_label == y.predicted_label &&
         x.degraded == y.degraded && x.backend_calls == y.backend_calls;
}

BaselineRecord::BaselineRecord(Statement statement, std::string raw_response,
                               BiasLabel predicted_label)
    : statement_(std::move(statement)),
      raw_response_(std::move(raw_response)),
      predicted_label_(predicted_label) {
  static constexpr std::array<std::string_view, 2> kAllowed{"biased", "unbiased"};
  std::string parsed;
  try {
    parsed = parse_keyword(raw_response_, kAllowed);
  } catch (const Unparseable&) {
    throw InvariantViolation("baseline raw_response does not name a label: \"" +
                             raw_response_ + "\"");
  }
  if (parse_bias_label(parsed) != predicted_label_) {
    throw InvariantViolation("baseline raw_response disagrees with predicted label");
  }
}

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table,
                        std::string_view s) noexcept {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table,
                         E v) noexcept {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<BiasLabel, std::string_view>, 2> kLabels{{
    {BiasLabel::Biased, "biased"},
    {BiasLabel::Unbiased, "unbiased"},
}};
constexpr std::array<std::pair<StatementType, std::string_view>, 2> kTypes{{
    {StatementType::Fact, "fact"},
    {StatementType::Opinion, "opinion"},
}};
constexpr std::array<std::pair<BiasLevel, std::string_view>, 2> kLevels{{
    {BiasLevel::High, "high"},
    {BiasLevel::Low, "low"},
}};
constexpr std::array<std::pair<FactCheckVerdict, std::string_view>, 2> kVerdicts{{
    {FactCheckVerdict::Clean, "clean"},
    {FactCheckVerdict::PotentiallyBiased, "potentially_biased"},
}};
constexpr std::array<std::pair<Stage, std::string_view>, 5> kStages{{
    {Stage::Checker, "checker"},
    {Stage::FactVerifier, "fact_verifier"},
    {Stage::Validator, "validator"},
    {Stage::Justifier, "justifier"},
    {Stage::Baseline, "baseline"},
}};

}  // namespace

std::string_view to_string(BiasLabel v) noexcept { return name_of(kLabels, v); }
std::string_view to_string(StatementType v) noexcept { return name_of(kTypes, v); }
std::string_view to_string(BiasLevel v) noexcept { return name_of(kLevels, v); }
std::string_view to_string(FactCheckVerdict v) noexcept { return name_of(kVerdicts, v); }
std::string_view to_string(Stage v) noexcept { return name_of(kStages, v); }

std::optional<BiasLabel> parse_bias_label(std::string_view s) noexcept { return lookup(kLabels, s); }
std::optional<StatementType> parse_statement_type(std::string_view s) noexcept {
  return lookup(kTypes, s);
}
std::optional<BiasLevel> parse_bias_level(std::string_view s) noexcept { return lookup(kLevels, s); }
std::optional<FactCheckVerdict> parse_fact_check_verdict(std::string_view s) noexcept {
  return lookup(kVerdicts, s);
}
std::optional<Stage> parse_stage(std::string_view s) noexcept { return lookup(kStages, s); }

bool has_content(std::string_view text) noexcept {
  return std::any_of(text.begin(), text.end(),
                     [](unsigned char c) { return !std::isspace(c); });
}

}  // namespace bias_audit
