#pragma once

#include <span>
#include <string>
#include <string_view>

namespace bias_audit {

/// Extracts one keyword from a model answer.
///
/// Phase one is strict: the trimmed, case-folded answer equals a keyword.
/// Phase two is lenient: exactly one of the allowed keywords occurs as a
/// whole word anywhere in the answer. Underscores inside a keyword also match
/// a space or hyphen, so "potentially biased" satisfies `potentially_biased`.
///
/// Returns the matching entry of `allowed` exactly as passed in. Throws
/// Unparseable when no keyword or more than one distinct keyword is found,
/// and std::invalid_argument when `allowed` is empty or two keywords overlap.
std::string parse_keyword(std::string_view response_text,
                          std::span<const std::string_view> allowed);

/// ASCII lowercase copy.
std::string to_lower_ascii(std::string_view s);

/// `s` without leading and trailing whitespace.
std::string_view trim(std::string_view s) noexcept;

}  // namespace bias_audit
