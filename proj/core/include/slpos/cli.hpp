#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slpos {

// Exit codes: 0 success, 1 runtime error, 2 usage/configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct CliInvocation {
  std::string subcommand;  // run | sweep | psl-check | protocol-trace
  std::string config_path;
  std::string output_dir = ".";
  std::vector<std::string> overrides;  // repeated --set key=value
  int workers = 1;
  std::optional<std::uint64_t> seed;  // --seed overrides master_seed
  bool dump_measurements = false;
  std::string results_path;    // psl-check input
  std::string psl_table_path;  // optional PSL table JSON
  std::string session;         // protocol-trace session kind override
};

// Parses argv and validates everything that can be validated before any
// computation (config file exists and parses, overrides hit existing keys).
// Throws UsageError / ConfigurationError on bad input.
CliInvocation parse_and_validate(int argc, const char* const* argv);

// Runs the subcommand; writes outputs under invocation.output_dir. Partial
// outputs are removed when a run fails midway. Throws on error.
void execute(const CliInvocation& invocation);

// parse + execute with exceptions mapped to exit codes.
int run_cli(int argc, const char* const* argv);

}  // namespace slpos
