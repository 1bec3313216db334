#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kou2d::cli {

/// Exit codes of the command-line front end.
enum ExitCode { kSuccess = 0, kValidationError = 1, kSolverFailure = 2 };

/// Parses `args` (without the program name) and runs the selected subcommand,
/// writing results to `out` and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kou2d::cli
