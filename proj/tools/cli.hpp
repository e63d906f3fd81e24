#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracsob::cli {

/// Exit codes of run().
enum ExitCode : int {
  kOk = 0,
  kViolations = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
};

/// Entry point of the fracsob tool. argv[0] is the program name.
/// Files go to --out (default $FRACSOB_OUT_DIR, else the working directory);
/// a short summary goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace fracsob::cli
