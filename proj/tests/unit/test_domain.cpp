#include <gtest/gtest.h>

#include "bias_audit/domain.hpp"
#include "bias_audit/errors.hpp"

namespace ba = bias_audit;
using ba::BiasLabel;
using ba::BiasLevel;
using ba::FactCheckVerdict;
using ba::StatementType;

namespace {

ba::AnalysisRecord::Fields opinion(BiasLevel level) {
  ba::AnalysisRecord::Fields f;
  f.statement = {1, "text", BiasLabel::Biased};
  f.statement_type = StatementType::Opinion;
  f.bias_level = level;
  f.predicted_label = ba::label_from_bias_level(level);
  f.justification = "because";
  return f;
}

TEST(LabelFromBiasLevel, Mapping) {
  EXPECT_EQ(ba::label_from_bias_level(BiasLevel::High), BiasLabel::Biased);
  EXPECT_EQ(ba::label_from_bias_level(BiasLevel::Low), BiasLabel::Unbiased);
  EXPECT_EQ(ba::label_from_bias_level(std::nullopt), BiasLabel::Unbiased);
}

TEST(AnalysisRecord, AcceptsLegalShapes) {
  EXPECT_NO_THROW(ba::AnalysisRecord{opinion(BiasLevel::High)});
  auto clean = opinion(BiasLevel::Low);
  clean.statement_type = StatementType::Fact;
  clean.fact_check = ba::FactCheckOutcome{FactCheckVerdict::Clean, std::nullopt};
  clean.bias_level.reset();
  clean.predicted_label = BiasLabel::Unbiased;
  EXPECT_NO_THROW(ba::AnalysisRecord{clean});
  auto flagged = opinion(BiasLevel::High);
  flagged.statement_type = StatementType::Fact;
  flagged.fact_check = ba::FactCheckOutcome{FactCheckVerdict::PotentiallyBiased, "loaded wording"};
  EXPECT_NO_THROW(ba::AnalysisRecord{flagged});
}

TEST(AnalysisRecord, RejectsBrokenInvariants) {
  auto f = opinion(BiasLevel::High);
  f.predicted_label = BiasLabel::Unbiased;
  EXPECT_THROW(ba::AnalysisRecord{f}, ba::InvariantViolation);

  f = opinion(BiasLevel::High);
  f.fact_check = ba::FactCheckOutcome{FactCheckVerdict::Clean, std::nullopt};
  EXPECT_THROW(ba::AnalysisRecord{f}, ba::InvariantViolation);

  f = opinion(BiasLevel::High);
  f.bias_level.reset();
  EXPECT_THROW(ba::AnalysisRecord{f}, ba::InvariantViolation);

  f = opinion(BiasLevel::Low);
  f.statement_type = StatementType::Fact;
  f.fact_check = ba::FactCheckOutcome{FactCheckVerdict::Clean, std::nullopt};
  EXPECT_THROW(ba::AnalysisRecord{f}, ba::InvariantViolation);  // clean fact with a bias level

  f = opinion(BiasLevel::Low);
  f.justification = " \n";
  EXPECT_THROW(ba::AnalysisRecord{f}, ba::InvariantViolation);
}

TEST(BaselineRecord, RawResponseMustAgreeWithLabel) {
  const ba::Statement s{0, "t", BiasLabel::Biased};
  EXPECT_NO_THROW(ba::BaselineRecord(s, "biased", BiasLabel::Biased));
  EXPECT_NO_THROW(ba::BaselineRecord(s, "Unbiased.", BiasLabel::Unbiased));
  EXPECT_THROW(ba::BaselineRecord(s, "biased", BiasLabel::Unbiased), ba::InvariantViolation);
  EXPECT_THROW(ba::BaselineRecord(s, "maybe", BiasLabel::Unbiased), ba::InvariantViolation);
}

TEST(EnumNames, RoundTrip) {
  for (auto st : {ba::Stage::Checker, ba::Stage::FactVerifier, ba::Stage::Validator, ba::Stage::Justifier,
                  ba::Stage::Baseline}) {
    EXPECT_EQ(ba::parse_stage(ba::to_string(st)), st);
  }
  EXPECT_EQ(ba::to_string(FactCheckVerdict::PotentiallyBiased), "potentially_biased");
  EXPECT_EQ(ba::parse_bias_level("medium"), std::nullopt);
}

}  // namespace
