#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hardynorm::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kNumericalFailure = 2,
  kCheckFailed = 3,
};

/// Runs one command line (without the program name) and returns the exit
/// code. Records go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hardynorm::cli
