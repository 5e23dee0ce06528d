#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "spinlink/config.hpp"

namespace spinlink {

struct CommandOutcome {
  int exit_code = 0;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs config.command and writes its tables to config.out (or `out` when no path
/// is set). Failures are reported on `err` as a one-line JSON record; the exit code
/// follows ErrorKind (0 on success).
CommandOutcome run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Path of the rate-vs-loss table for one constraint: "rates.csv" -> "rates_F0.95.csv".
std::filesystem::path constraint_path(const std::filesystem::path& base, double f_target);

}  // namespace spinlink
