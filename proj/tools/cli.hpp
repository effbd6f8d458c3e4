#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace exactbn::cli {

/// Exit codes of the exactbn command.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadFlags = 2,
  kDataError = 3,
  kCacheMismatch = 4,
  kTooManyVariables = 5,
};

/// Runs the command line `args` (without the program name). Regular output
/// goes to `out`, the one-line diagnostic on failure to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace exactbn::cli
