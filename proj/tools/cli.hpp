#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nspf::cli {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_runtime = 2 };

/// Runs one command line (args[0] is the program name) and returns the exit
/// code. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nspf::cli
