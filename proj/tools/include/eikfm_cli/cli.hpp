#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eikfm::cli {

enum ExitCode : int {
  kOk = 0,
  kNumericalFailure = 1,
  kUsageError = 2,
};

/// Runs the command line `args` (without the program name) and returns the
/// process exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eikfm::cli
