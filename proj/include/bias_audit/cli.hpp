#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bias_audit::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
/// `run`: failure fraction above --max-failures. `replay`: output diverged.
inline constexpr int kExitFailure = 1;
/// Bad flags, unreadable or malformed inputs, missing credentials.
inline constexpr int kExitConfig = 2;

/// Subcommands: run, metrics, replay, templates. `argv[0]` is the program
/// name.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Same, with arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a config file of `key = value` lines (`#` starts a comment, blank
/// lines are ignored) and returns `--key value` tokens. Throws ConfigError.
std::vector<std::string> config_file_tokens(const std::string& path);

}  // namespace bias_audit::cli
