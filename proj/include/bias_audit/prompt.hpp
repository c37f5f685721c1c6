#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "bias_audit/domain.hpp"

namespace bias_audit {

/// One template per agent role. The validator and justifier each have two
/// variants; every other stage has one.
enum class PromptKind {
  Checker,
  FactVerifier,
  ValidatorOpinion,
  ValidatorFact,
  JustifierUnbiased,
  JustifierBiased,
  Baseline,
};

inline constexpr std::array<PromptKind, 7> kAllPromptKinds{
    PromptKind::Checker,           PromptKind::FactVerifier,    PromptKind::ValidatorOpinion,
    PromptKind::ValidatorFact,     PromptKind::JustifierUnbiased, PromptKind::JustifierBiased,
    PromptKind::Baseline,
};

/// File stem of the template, e.g. "validator_fact".
std::string_view to_string(PromptKind kind) noexcept;
std::optional<PromptKind> parse_prompt_kind(std::string_view s) noexcept;
Stage stage_of(PromptKind kind) noexcept;

inline constexpr std::string_view kStatementPlaceholder = "{statement}";

/// Prompt body with exactly one `{statement}` placeholder. Justifier
/// templates may also use `{verdict}` and `{analysis}`.
class PromptTemplate {
 public:
  /// Throws MissingPlaceholder unless `body` has exactly one `{statement}`.
  PromptTemplate(PromptKind kind, std::string body);

  PromptKind kind() const noexcept { return kind_; }
  Stage stage() const noexcept { return stage_of(kind_); }
  const std::string& body() const noexcept { return body_; }
  /// SHA-256 hex of the body bytes.
  const std::string& content_hash() const noexcept { return hash_; }

 private:
  PromptKind kind_;
  std::string body_;
  std::string hash_;
};

/// Substitutes the placeholders in one left-to-right pass over the template
/// body. Inserted text is never rescanned, so braces inside the statement
/// survive verbatim. Unknown `{...}` tokens in the body are left alone.
std::string render_prompt(const PromptTemplate& tpl, const Statement& statement);
std::string render_prompt(const PromptTemplate& tpl, const Statement& statement,
                          const std::map<std::string, std::string, std::less<>>& extras);

/// The seven templates a run uses.
class PromptSet {
 public:
  /// Templates compiled into the library from templates/*.txt.
  static PromptSet builtin();

  /// Reads `<dir>/<kind>.txt` for each kind. Kinds without a file keep the
  /// built-in body. Throws IoError if `dir` is not a directory.
  static PromptSet load(const std::filesystem::path& dir);

  const PromptTemplate& get(PromptKind kind) const;

  /// Content hash per template kind, keyed by file stem.
  std::map<std::string, std::string> hashes() const;

  /// Directory the set was loaded from; empty for built-ins.
  const std::optional<std::filesystem::path>& source_dir() const noexcept { return dir_; }

  /// Writes every template as `<dir>/<kind>.txt`.
  void write_to(const std::filesystem::path& dir) const;

 private:
  PromptSet() = default;
  std::map<PromptKind, PromptTemplate> templates_;
  std::optional<std::filesystem::path> dir_;
};

}  // namespace bias_audit
