#include "bias_audit/prompt.hpp"

#include <fstream>
#include <sstream>

#include "bias_audit/errors.hpp"
#include "bias_audit/sha256.hpp"

namespace bias_audit {

namespace detail {
const std::map<std::string, std::string>& builtin_template_bodies();
}

namespace {

constexpr std::array<std::pair<PromptKind, std::string_view>, 7> kNames{{
    {PromptKind::Checker, "checker"},
    {PromptKind::FactVerifier, "fact_verifier"},
    {PromptKind::ValidatorOpinion, "validator_opinion"},
    {PromptKind::ValidatorFact, "validator_fact"},
    {PromptKind::JustifierUnbiased, "justifier_unbiased"},
    {PromptKind::JustifierBiased, "justifier_biased"},
    {PromptKind::Baseline, "baseline"},
}};

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

std::string_view to_string(PromptKind kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<PromptKind> parse_prompt_kind(std::string_view s) noexcept {
  for (const auto& [k, name] : kNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

Stage stage_of(PromptKind kind) noexcept {
  switch (kind) {
    case PromptKind::Checker: return Stage::Checker;
    case PromptKind::FactVerifier: return Stage::FactVerifier;
    case PromptKind::ValidatorOpinion:
    case PromptKind::ValidatorFact: return Stage::Validator;
    case PromptKind::JustifierUnbiased:
    case PromptKind::JustifierBiased: return Stage::Justifier;
    case PromptKind::Baseline: return Stage::Baseline;
  }
  return Stage::Checker;
}

PromptTemplate::PromptTemplate(PromptKind kind, std::string body)
    : kind_(kind), body_(std::move(body)) {
  const auto n = count_occurrences(body_, kStatementPlaceholder);
  if (n != 1) {
    throw MissingPlaceholder(std::string(to_string(kind)) + " template must contain exactly one " +
                             std::string(kStatementPlaceholder) + " placeholder, found " +
                             std::to_string(n));
  }
  hash_ = sha256_hex(body_);
}

std::string render_prompt(const PromptTemplate& tpl, const Statement& statement) {
  return render_prompt(tpl, statement, {});
}

std::string render_prompt(const PromptTemplate& tpl, const Statement& statement,
                          const std::map<std::string, std::string, std::less<>>& extras) {
  const std::string_view body = tpl.body();
  std::string out;
  out.reserve(body.size() + statement.text.size());
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      const auto close = body.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto token = body.substr(i, close - i + 1);
        if (token == kStatementPlaceholder) {
          out += statement.text;
          i = close + 1;
          continue;
        }
        if (auto it = extras.find(token.substr(1, token.size() - 2)); it != extras.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(body[i++]);
  }
  return out;
}

PromptSet PromptSet::builtin() {
  PromptSet set;
  const auto& bodies = detail::builtin_template_bodies();
  for (auto kind : kAllPromptKinds) {
    set.templates_.emplace(kind, PromptTemplate(kind, bodies.at(std::string(to_string(kind)))));
  }
  return set;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("template directory not found: " + dir.string());
  }
  PromptSet set = builtin();
  set.dir_ = dir;
  for (auto kind : kAllPromptKinds) {
    const auto file = dir / (std::string(to_string(kind)) + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    set.templates_.insert_or_assign(kind, PromptTemplate(kind, ss.str()));
  }
  return set;
}

const PromptTemplate& PromptSet::get(PromptKind kind) const { return templates_.at(kind); }

std::map<std::string, std::string> PromptSet::hashes() const {
  std::map<std::string, std::string> out;
  for (const auto& [kind, tpl] : templates_) out.emplace(to_string(kind), tpl.content_hash());
  return out;
}

void PromptSet::write_to(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [kind, tpl] : templates_) {
    const auto file = dir / (std::string(to_string(kind)) + ".txt");
    std::ofstream out(file, std::ios::binary);
    out << tpl.body();
    if (!out) throw IoError("cannot write " + file.string());
  }
}

}  // namespace bias_audit
