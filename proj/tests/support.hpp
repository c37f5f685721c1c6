#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "bias_audit/cli.hpp"

namespace bias_audit::testing {

inline std::filesystem::path fixtures_dir() { return BIAS_AUDIT_FIXTURES_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("bias_audit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

/// JSON Lines corpus of `n` statements, labels alternating 1/0.
inline void write_corpus(const std::filesystem::path& p, std::size_t n) {
  std::ofstream out(p, std::ios::binary);
  for (std::size_t i = 0; i < n; ++i) {
    out << "{\"text\": \"Statement " << i << " about {braces} and \\\"quotes\\\".\", \"label\": " << (i % 2 == 0 ? 1 : 0)
        << "}\n";
  }
}

/// Script covering all four routes, chosen per statement id:
/// id%4 = 0 opinion/high, 1 opinion/low, 2 fact/clean, 3 fact/flagged/high.
/// Statement 1 needs a parse retry at the checker; statement 5 gets an empty
/// justification first.
inline void write_route_script(const std::filesystem::path& p, std::size_t n) {
  std::ofstream out(p, std::ios::binary);
  out << "{\"stage\": \"justifier\", \"response\": \"The wording is measured.\"}\n";
  out << "{\"stage\": \"baseline\", \"response\": \"Unbiased.\"}\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = std::to_string(i);
    auto line = [&](const std::string& stage, const std::string& body) {
      out << "{\"statement_id\": " << id << ", \"stage\": \"" << stage << "\", " << body << "}\n";
    };
    switch (i % 4) {
      case 0:
        line("checker", "\"response\": \"OPINION\"");
        line("validator", "\"response\": \"HIGH\"");
        break;
      case 1:
        line("checker", i == 1 ? "\"responses\": [\"hmm\", \"Opinion\"]" : "\"response\": \"opinion\"");
        line("validator", "\"response\": \"low\"");
        break;
      case 2:
        line("checker", "\"response\": \"FACT\"");
        line("fact_verifier", "\"response\": \"CLEAN\"");
        break;
      default:
        line("checker", "\"response\": \"FACT\"");
        line("fact_verifier", "\"response\": \"POTENTIALLY_BIASED\"");
        line("validator", "\"response\": \"HIGH\"");
        break;
    }
    if (i % 3 == 0) line("baseline", "\"response\": \"biased\"");
    if (i == 5) line("justifier", "\"responses\": [\"\", \"One-sided framing.\"]");
  }
}

}  // namespace bias_audit::testing
