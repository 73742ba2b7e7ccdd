#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "produpd/error.hpp"

namespace produpd::cli {

enum ExitStatus : int { Success = 0, Failure = 1, Usage = 2 };

/// Exit status for a library error: input problems are usage errors, the
/// rest are semantic failures.
ExitStatus status_for(ErrorCode code);

/// Runs one command line. `args` excludes the program name. Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace produpd::cli
