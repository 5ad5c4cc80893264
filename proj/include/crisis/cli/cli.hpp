#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crisis::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 1,
  kIoError = 2,
  kBackendError = 3,
};

/// Runs one command line. `args[0]` is the program name. Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crisis::cli
