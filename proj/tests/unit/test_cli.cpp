#include <gtest/gtest.h>
#include <json.hpp>

#include "bias_audit/cli.hpp"
#include "bias_audit/errors.hpp"
#include "bias_audit/report.hpp"
#include "support.hpp"

namespace ba = bias_audit;
using ba::testing::run_cli;

namespace {

class CliTest : public ::testing::Test {
 protected:
  ba::testing::TempDir dir;
  std::string corpus = (dir / "corpus.jsonl").string();
  std::string script = (dir / "script.jsonl").string();

  void SetUp() override {
    ba::testing::write_corpus(corpus, 20);
    ba::testing::write_route_script(script, 20);
  }

  ba::testing::CliResult run(const std::string& mode, const std::string& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"run",       "--mode", mode, "--dataset", corpus, "--backend",
                                  "scripted:" + script, "--out", out};
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  }
};

TEST_F(CliTest, RunPipelineWritesResults) {
  const auto out = (dir / "a.json").string();
  const auto r = run("pipeline", out, {"--sample-size", "12", "--seed", "42"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "scored 12, failed 0, wrote " + out + "\n");
  const auto doc = ba::read_results(out);
  EXPECT_EQ(doc.results.analyses.size(), 12u);
  EXPECT_EQ(doc.manifest.sample_size, 12u);
  EXPECT_EQ(doc.manifest.corpus_size, 20u);
  EXPECT_EQ(doc.manifest.prompt_hashes.size(), 7u);
}

TEST_F(CliTest, RunBaselineShape) {
  const auto out = (dir / "b.json").string();
  const auto r = run("baseline", out);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(ba::testing::read_text(out));
  EXPECT_EQ(j["results"].size(), 20u);
  EXPECT_TRUE(j["results"][0].contains("raw_response"));
  EXPECT_FALSE(j["results"][0].contains("analysis"));
}

TEST_F(CliTest, MissingApiKeyNamesVariable) {
  ::unsetenv("BIAS_AUDIT_API_KEY_OPENAI");
  const auto r = run_cli({"run", "--dataset", corpus, "--backend", "openai:gpt-4o", "--out", (dir / "x.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("BIAS_AUDIT_API_KEY_OPENAI"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run("sideways", (dir / "x.json").string()).code, 2);
  EXPECT_EQ(run("pipeline", (dir / "x.json").string(), {"--sample-size", "lots"}).code, 2);
  EXPECT_EQ(run("pipeline", (dir / "x.json").string(), {"--sample-size", "21"}).code, 2);
  EXPECT_EQ(run("pipeline", (dir / "x.json").string(), {"--concurrency", "0"}).code, 2);
  EXPECT_EQ(run_cli({"run", "--dataset", corpus}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, FailureThreshold) {
  ba::testing::write_text(script, ba::testing::read_text(script) +
                                      "{\"statement_id\": 4, \"stage\": \"checker\", \"error\": \"auth_error\"}\n");
  const auto out = (dir / "f.json").string();
  auto r = run("pipeline", out);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "scored 19, failed 1, wrote " + out + "\n");
  EXPECT_NE(r.err.find("statement 4"), std::string::npos);
  r = run("pipeline", out, {"--max-failures", "0.1"});
  EXPECT_EQ(r.code, 0);
}

TEST_F(CliTest, ConfigFileFlagsWin) {
  const auto cfg = dir / "run.cfg";
  ba::testing::write_text(cfg, "# defaults\nsample-size = 5\nseed = 7\nmode = baseline\n");
  const auto out = (dir / "c.json").string();
  const auto r = run("pipeline", out, {"--config", cfg.string(), "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = ba::read_results(out);
  EXPECT_EQ(doc.manifest.mode, ba::RunMode::Pipeline);
  EXPECT_EQ(doc.manifest.seed, 9u);
  EXPECT_EQ(doc.manifest.sample_size, 5u);
  ba::testing::write_text(cfg, "this line has no equals sign\n");
  EXPECT_EQ(run("pipeline", out, {"--config", cfg.string()}).code, 2);
}

TEST_F(CliTest, MetricsAndCompare) {
  const auto a = (dir / "a.json").string();
  ASSERT_EQ(run("pipeline", a).code, 0);
  auto r = run_cli({"metrics", a});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Accuracy"), std::string::npos);
  EXPECT_NE(r.out.find("true biased"), std::string::npos);

  const auto json_out = (dir / "m.json").string();
  const auto prefix = (dir / "cm").string();
  r = run_cli({"metrics", a, "--compare", a, "--json", json_out, "--confusion-csv", prefix});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("z = 0.000"), std::string::npos) << r.out;
  EXPECT_EQ(nlohmann::json::parse(ba::testing::read_text(json_out))["z_test"]["z"], 0.0);
  EXPECT_TRUE(std::filesystem::exists(prefix + "_a.csv"));
  EXPECT_TRUE(std::filesystem::exists(prefix + "_b.csv"));
}

TEST_F(CliTest, MetricsOnMalformedFileNamesPath) {
  const auto a = (dir / "a.json").string();
  ASSERT_EQ(run("pipeline", a).code, 0);
  auto j = nlohmann::ordered_json::parse(ba::testing::read_text(a));
  j["results"][2]["analysis"]["bias_score"] = "medium";
  ba::testing::write_text(a, j.dump(2));
  const auto r = run_cli({"metrics", a});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("results[2].analysis.bias_score"), std::string::npos) << r.err;
}

TEST_F(CliTest, ReplayMatchesAndDetectsEdits) {
  const auto a = (dir / "a.json").string();
  const auto t = (dir / "t.jsonl").string();
  ASSERT_EQ(run("pipeline", a, {"--transcript", t, "--concurrency", "4"}).code, 0);
  auto r = run_cli({"replay", "--results", a, "--transcript", t});
  EXPECT_EQ(r.code, 0) << r.err;

  // Change the justification recorded for statement 6.
  std::string lines = ba::testing::read_text(t);
  std::string edited;
  std::istringstream in(lines);
  std::string line;
  bool done = false;
  while (std::getline(in, line)) {
    auto e = nlohmann::ordered_json::parse(line);
    if (!done && e["statement_id"] == 6 && e["stage"] == "justifier") {
      e["response_text"] = "Edited.";
      done = true;
    }
    edited += e.dump() + "\n";
  }
  ASSERT_TRUE(done);
  const auto t2 = (dir / "t2.jsonl").string();
  ba::testing::write_text(t2, edited);
  r = run_cli({"replay", "--results", a, "--transcript", t2});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("statement 6"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("Edited."), std::string::npos) << r.err;
}

TEST_F(CliTest, ReplayWithMissingKey) {
  const auto a = (dir / "a.json").string();
  const auto t = (dir / "t.jsonl").string();
  ASSERT_EQ(run("baseline", a, {"--transcript", t}).code, 0);
  std::string kept;
  std::istringstream in(ba::testing::read_text(t));
  std::string line;
  while (std::getline(in, line)) {
    if (nlohmann::json::parse(line)["statement_id"] != 3) kept += line + "\n";
  }
  const auto t2 = (dir / "t2.jsonl").string();
  ba::testing::write_text(t2, kept);
  const auto r = run_cli({"replay", "--results", a, "--transcript", t2});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("statement 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, ReplayRejectsChangedDataset) {
  const auto a = (dir / "a.json").string();
  const auto t = (dir / "t.jsonl").string();
  ASSERT_EQ(run("baseline", a, {"--transcript", t}).code, 0);
  ba::testing::write_corpus(corpus, 21);
  const auto r = run_cli({"replay", "--results", a, "--transcript", t});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("digest"), std::string::npos);
}

TEST_F(CliTest, TemplatesRoundTripThroughRun) {
  const auto tdir = (dir / "tpl").string();
  ASSERT_EQ(run_cli({"templates", "--out", tdir}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "tpl" / "validator_fact.txt"));
  const auto a = (dir / "a.json").string();
  const auto r = run("pipeline", a, {"--templates", tdir});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ba::read_results(a).manifest.templates_dir, tdir);
}

}  // namespace
