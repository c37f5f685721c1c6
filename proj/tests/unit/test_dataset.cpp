#include <fstream>

#include <gtest/gtest.h>

#include "bias_audit/dataset.hpp"
#include "bias_audit/errors.hpp"
#include "bias_audit/splitmix64.hpp"
#include "support.hpp"

namespace ba = bias_audit;

namespace {

ba::DatasetConfig config(const std::filesystem::path& p, ba::DatasetFormat f) {
  ba::DatasetConfig c;
  c.path = p;
  c.format = f;
  return c;
}

std::vector<ba::Statement> corpus(std::size_t n) {
  std::vector<ba::Statement> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({i, "s" + std::to_string(i), ba::BiasLabel::Unbiased});
  return out;
}

TEST(LoadCorpus, JsonLines) {
  ba::testing::TempDir dir;
  ba::testing::write_text(dir / "d.jsonl", "{\"text\": \"A\", \"label\": 1}\n\n{\"text\": \"B\", \"label\": 0}\n");
  const auto s = ba::load_corpus(config(dir / "d.jsonl", ba::DatasetFormat::Jsonl));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].id, 0u);
  EXPECT_EQ(s[0].true_label, ba::BiasLabel::Biased);
  EXPECT_EQ(s[1].id, 1u);
  EXPECT_EQ(s[1].true_label, ba::BiasLabel::Unbiased);
}

TEST(LoadCorpus, UnmappedLabel) {
  ba::testing::TempDir dir;
  ba::testing::write_text(dir / "d.jsonl", "{\"text\": \"A\", \"label\": 1}\n{\"text\": \"B\", \"label\": 2}\n");
  try {
    ba::load_corpus(config(dir / "d.jsonl", ba::DatasetFormat::Jsonl));
    FAIL();
  } catch (const ba::UnmappedLabel& e) {
    EXPECT_EQ(e.row(), 1u);
    EXPECT_EQ(e.value(), "2");
  }
}

TEST(LoadCorpus, CsvQuotedCommaAndNewline) {
  ba::testing::TempDir dir;
  ba::testing::write_text(dir / "d.csv",
                          "\xEF\xBB\xBFid,text,label\r\n"
                          "1,\"Hello, world\",1\r\n"
                          "2,\"She said \"\"no\"\"\nthen left\",0\n");
  const auto s = ba::load_corpus(config(dir / "d.csv", ba::DatasetFormat::Csv));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].text, "Hello, world");
  EXPECT_EQ(s[1].text, "She said \"no\"\nthen left");
  EXPECT_EQ(s[1].true_label, ba::BiasLabel::Unbiased);
}

TEST(LoadCorpus, TsvWithCustomFieldsAndMapping) {
  ba::testing::TempDir dir;
  ba::testing::write_text(dir / "d.tsv", "sentence\tclass\nIt rained.\tneutral\nThey ruined it.\tbiased\n");
  auto c = config(dir / "d.tsv", ba::DatasetFormat::Tsv);
  c.text_field = "sentence";
  c.label_field = "class";
  c.label_mapping = ba::LabelMapping::parse("biased=biased,neutral=unbiased");
  const auto s = ba::load_corpus(c);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].true_label, ba::BiasLabel::Biased);
}

TEST(LoadCorpus, Errors) {
  ba::testing::TempDir dir;
  ba::testing::write_text(dir / "a.jsonl", "{\"text\": \"  \", \"label\": 1}\n");
  EXPECT_THROW(ba::load_corpus(config(dir / "a.jsonl", ba::DatasetFormat::Jsonl)), ba::EmptyText);
  ba::testing::write_text(dir / "b.jsonl", "{\"text\": \"x\"\n");
  EXPECT_THROW(ba::load_corpus(config(dir / "b.jsonl", ba::DatasetFormat::Jsonl)), ba::ParseError);
  ba::testing::write_text(dir / "c.csv", "text,label\n\"unterminated,1\n");
  EXPECT_THROW(ba::load_corpus(config(dir / "c.csv", ba::DatasetFormat::Csv)), ba::ParseError);
  ba::testing::write_text(dir / "d.csv", "text,other\nx,1\n");
  EXPECT_THROW(ba::load_corpus(config(dir / "d.csv", ba::DatasetFormat::Csv)), ba::ParseError);
  ba::testing::write_text(dir / "e.csv", "text,label\n\xC3\x28,1\n");
  EXPECT_THROW(ba::load_corpus(config(dir / "e.csv", ba::DatasetFormat::Csv)), ba::ParseError);
  EXPECT_THROW(ba::load_corpus(config(dir / "missing.csv", ba::DatasetFormat::Csv)), ba::IoError);
}

TEST(LabelMapping, ParseEncodeDecode) {
  const auto m = ba::LabelMapping::parse("0=biased, 1=unbiased");
  EXPECT_EQ(m.decode("0"), ba::BiasLabel::Biased);
  EXPECT_EQ(m.encode(ba::BiasLabel::Unbiased), "1");
  EXPECT_EQ(m.decode("2"), std::nullopt);
  EXPECT_THROW(ba::LabelMapping::parse("1=maybe"), ba::ConfigError);
  EXPECT_THROW(ba::LabelMapping::parse("1=biased,1=unbiased"), ba::ConfigError);
  EXPECT_EQ(ba::LabelMapping().encode(ba::BiasLabel::Biased), "1");
}

TEST(Sample, PinnedSmallCase) {
  // Pinned from tests/oracles/sample_oracle.py 10 3 42.
  const auto s = ba::sample(corpus(10), 3, 42);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].id, 3u);
  EXPECT_EQ(s[1].id, 6u);
  EXPECT_EQ(s[2].id, 8u);
}

TEST(Sample, EdgeCases) {
  const auto all = ba::sample(corpus(10), 10, 7);
  ASSERT_EQ(all.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(all[i].id, i);
  EXPECT_TRUE(ba::sample(corpus(10), 0, 7).empty());
  EXPECT_THROW(ba::sample(corpus(10), 11, 7), ba::SampleTooLarge);
}

TEST(Sample, PrefixProperty) {
  // Growing k only adds statements: the first k shuffled slots are a prefix.
  for (std::uint64_t seed : {1u, 42u, 999u}) {
    const auto small = ba::sample_indices(200, 20, seed);
    const auto big = ba::sample_indices(200, 60, seed);
    for (auto i : small) EXPECT_TRUE(std::binary_search(big.begin(), big.end(), i));
  }
}

TEST(SplitMix64, ReferenceOutputs) {
  // First outputs for seed 0 from the reference generator.
  ba::SplitMix64 rng(0);
  EXPECT_EQ(rng(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng(), 0x06C45D188009454FULL);
}

TEST(BoundedUniform, StaysInRange) {
  ba::SplitMix64 rng(3);
  for (std::uint64_t bound : {1ULL, 2ULL, 3ULL, 1000ULL, (1ULL << 63) + 5}) {
    for (int i = 0; i < 1000; ++i) EXPECT_LT(ba::bounded_uniform(rng, bound), bound);
  }
}

TEST(WriteJsonl, RoundTripsThroughLoader) {
  ba::testing::TempDir dir;
  std::vector<ba::Statement> s{{0, "a \"q\"", ba::BiasLabel::Biased}, {1, "b", ba::BiasLabel::Unbiased}};
  auto c = config(dir / "o.jsonl", ba::DatasetFormat::Jsonl);
  ba::write_jsonl(s, c.path, c);
  EXPECT_EQ(ba::testing::read_text(c.path), "{\"text\":\"a \\\"q\\\"\",\"label\":1}\n{\"text\":\"b\",\"label\":0}\n");
  EXPECT_EQ(ba::load_corpus(c), s);
}

TEST(IntegerLiteral, Canonical) {
  EXPECT_TRUE(ba::is_integer_literal("0"));
  EXPECT_TRUE(ba::is_integer_literal("-3"));
  EXPECT_FALSE(ba::is_integer_literal("01"));
  EXPECT_FALSE(ba::is_integer_literal("1.0"));
  EXPECT_FALSE(ba::is_integer_literal("biased"));
  EXPECT_FALSE(ba::is_integer_literal(""));
}

}  // namespace
