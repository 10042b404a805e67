#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fpplab {

/// Exit codes of the command-line driver.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2, kExitVerification = 3 };

/// Runs one subcommand; `args` excludes the program name.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_run(int argc, char** argv);

/// Fits chi from a summary JSON (ours, or {"n": [...], "variance": [...]})
/// or a CSV with columns n and var_T. Throws std::runtime_error on bad input.
std::vector<std::pair<double, double>> read_variance_table(const std::string& path);

}  // namespace fpplab
