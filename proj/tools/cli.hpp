#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace glop::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kSolverFailure = 3,
};

/// Runs one subcommand. args excludes the program name. Tables and progress go to
/// `out`, diagnostics to `err`; machine-readable results are only written to files.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(const std::vector<std::string>& args);

}  // namespace glop::cli
