#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace infocascade {

inline constexpr const char* kToolVersion = "infocascade 0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,  ///< bad flags, unreadable or malformed rule file, IO failure
  kExitSpec = 2,
  kExitSolver = 3,
  kExitVerify = 4,
};

/// Options shared by the subcommands. Paths do not enter the config digest.
struct RunConfig {
  std::string subcommand;  ///< solve, simulate, cascade-scan or verify
  std::string spec_path;
  std::string out_dir = ".";
  /// Solved rule to read; defaults to <out_dir>/rule.json.
  std::string rule_path;
  std::size_t grid_k = 51;
  double tolerance = 1e-9;
  std::size_t max_iterations = 100;
  std::optional<std::size_t> horizon;
  std::size_t trajectories = 1000;
  std::uint64_t seed = 1;
  /// "csv" writes per-period trajectory rows; "summary" writes aggregates only.
  std::string format = "csv";
  /// simulate: "rule" follows the solved rule; "constant:K" plays action K everywhere;
  /// "myopic" is the one-period best reply of the investment game.
  std::string policy = "rule";
  std::optional<std::size_t> force_state;
  /// cascade-scan: longest common history checked for equivalence.
  std::size_t scan_depth = 3;

  /// Empty when valid, otherwise the first problem found.
  std::string check() const;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::string> files;  ///< written, in order
};

/// Dispatches on config.subcommand. Progress and diagnostics go to `log`.
RunResult run_command(const RunConfig& config, std::ostream& log);

RunResult cmd_solve(const RunConfig& config, std::ostream& log);
RunResult cmd_simulate(const RunConfig& config, std::ostream& log);
RunResult cmd_cascade_scan(const RunConfig& config, std::ostream& log);
RunResult cmd_verify(const RunConfig& config, std::ostream& log);

/// FNV-1a digest of the effective spec text and the digest-relevant options.
std::uint64_t config_digest(const std::string& spec_text, const RunConfig& config);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace infocascade
