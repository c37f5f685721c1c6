#include "bias_audit/keyword.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <vector>

#include "bias_audit/errors.hpp"

namespace bias_audit {

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) noexcept {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_joiner(char c) { return c == '_' || c == ' ' || c == '-'; }

// Maps joiners to '_' so "potentially biased" compares equal to the keyword.
std::string fold(std::string_view s) {
  std::string out = to_lower_ascii(s);
  std::replace_if(out.begin(), out.end(), is_joiner, '_');
  return out;
}

// Length of a match of `keyword` (lowercase) at text[pos], or 0.
std::size_t match_at(std::string_view text, std::size_t pos, std::string_view keyword) {
  std::size_t t = pos;
  for (std::size_t k = 0; k < keyword.size(); ++k) {
    if (keyword[k] == '_') {
      if (t >= text.size() || !is_joiner(text[t])) return 0;
      while (t < text.size() && is_joiner(text[t])) ++t;
      continue;
    }
    if (t >= text.size() || text[t] != keyword[k]) return 0;
    ++t;
  }
  return t - pos;
}

bool occurs_as_word(std::string_view lowered_text, std::string_view keyword) {
  for (std::size_t pos = 0; pos < lowered_text.size(); ++pos) {
    if (pos > 0 && is_word_char(lowered_text[pos - 1])) continue;
    const std::size_t len = match_at(lowered_text, pos, keyword);
    if (len == 0) continue;
    const std::size_t end = pos + len;
    if (end < lowered_text.size() && is_word_char(lowered_text[end])) continue;
    return true;
  }
  return false;
}

}  // namespace

std::string parse_keyword(std::string_view response_text,
                          std::span<const std::string_view> allowed) {
  if (allowed.empty()) throw std::invalid_argument("parse_keyword: no keywords allowed");

  std::vector<std::string> keys;
  keys.reserve(allowed.size());
  for (auto k : allowed) keys.push_back(fold(trim(k)));
  for (std::size_t i = 0; i < keys.size(); ++i) {
    std::string spaced = keys[i];
    std::replace(spaced.begin(), spaced.end(), '_', ' ');
    for (std::size_t j = 0; j < keys.size(); ++j) {
      if (i != j && occurs_as_word(spaced, keys[j])) {
        throw std::invalid_argument("parse_keyword: keywords overlap: " +
                                    std::string(allowed[i]) + ", " + std::string(allowed[j]));
      }
    }
  }

  const std::string strict = fold(trim(response_text));
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (strict == keys[i]) return std::string(allowed[i]);
  }

  const std::string lowered = to_lower_ascii(response_text);
  std::size_t hits = 0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (occurs_as_word(lowered, keys[i])) {
      ++hits;
      found = i;
    }
  }
  if (hits == 1) return std::string(allowed[found]);
  throw Unparseable(hits == 0 ? "no allowed keyword in response"
                              : "more than one allowed keyword in response",
                    std::string(response_text));
}

}  // namespace bias_audit
