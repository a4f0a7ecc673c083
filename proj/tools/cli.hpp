#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace collimetric::cli {

/// Exit codes: 0 success, 1 evaluation error, 2 usage error.
enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

/// Runs one invocation; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace collimetric::cli
