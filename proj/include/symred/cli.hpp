#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symred {

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitUsage = 2 };

// Entry point of the `symred` tool. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symred
