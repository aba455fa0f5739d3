#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "volres/config.hpp"

namespace volres {

/// Exit codes of the command-line front end.
enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

/// Runs one subcommand. `args` excludes the program name. Results go to `out`
/// (or the --out file, resolved against VOLRES_OUTPUT_DIR when relative),
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace volres
