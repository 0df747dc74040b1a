#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace psys::harness {

enum ExitCode : int { kSuccess = 0, kNotConverged = 1, kInputError = 2 };

/// Entry point of the command-line tool. `args` excludes the program name.
/// Results go to --out when given, otherwise to `out`; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psys::harness
