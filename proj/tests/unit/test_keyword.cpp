#include <array>

#include <gtest/gtest.h>

#include "bias_audit/errors.hpp"
#include "bias_audit/keyword.hpp"

namespace ba = bias_audit;

namespace {

constexpr std::array<std::string_view, 2> kTypes{"fact", "opinion"};
constexpr std::array<std::string_view, 2> kVerifier{"clean", "potentially_biased"};
constexpr std::array<std::string_view, 2> kBaseline{"biased", "unbiased"};

TEST(ParseKeyword, StrictAfterTrimAndCaseFold) { EXPECT_EQ(ba::parse_keyword(" FACT\n", kTypes), "fact"); }

TEST(ParseKeyword, LenientUniqueHit) {
  EXPECT_EQ(ba::parse_keyword("I believe this is an OPINION because...", kTypes), "opinion");
}

TEST(ParseKeyword, TwoDistinctHitsAreUnparseable) {
  EXPECT_THROW(ba::parse_keyword("fact or opinion, hard to say", kTypes), ba::Unparseable);
}

TEST(ParseKeyword, NoHitIsUnparseableAndKeepsResponse) {
  try {
    ba::parse_keyword("maybe", kBaseline);
    FAIL() << "expected Unparseable";
  } catch (const ba::Unparseable& e) {
    EXPECT_EQ(e.response(), "maybe");
  }
}

TEST(ParseKeyword, RepeatedSameKeywordIsFine) {
  EXPECT_EQ(ba::parse_keyword("Fact. Definitely a fact.", kTypes), "fact");
}

TEST(ParseKeyword, WholeWordsOnly) {
  // "unbiased" must not count as a hit for "biased".
  EXPECT_EQ(ba::parse_keyword("Unbiased.", kBaseline), "unbiased");
  EXPECT_EQ(ba::parse_keyword("The statement is biased.", kBaseline), "biased");
  EXPECT_THROW(ba::parse_keyword("factual", kTypes), ba::Unparseable);
}

TEST(ParseKeyword, UnderscoreMatchesSpaceOrHyphen) {
  EXPECT_EQ(ba::parse_keyword("POTENTIALLY_BIASED", kVerifier), "potentially_biased");
  EXPECT_EQ(ba::parse_keyword("It is potentially biased.", kVerifier), "potentially_biased");
  EXPECT_EQ(ba::parse_keyword("Potentially-biased", kVerifier), "potentially_biased");
  EXPECT_EQ(ba::parse_keyword("clean", kVerifier), "clean");
}

TEST(ParseKeyword, EmptyAllowedSetIsProgrammingError) {
  EXPECT_THROW(ba::parse_keyword("x", std::span<const std::string_view>{}), std::invalid_argument);
}

TEST(ParseKeyword, EmptyAnswerIsUnparseable) { EXPECT_THROW(ba::parse_keyword("   ", kTypes), ba::Unparseable); }

TEST(Trim, StripsBothEnds) {
  EXPECT_EQ(ba::trim("  a b \n\t"), "a b");
  EXPECT_EQ(ba::trim(""), "");
  EXPECT_EQ(ba::to_lower_ascii("MiXeD"), "mixed");
}

}  // namespace
