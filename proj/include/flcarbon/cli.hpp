#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flcarbon {

// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 2,
    kExitSimulation = 3,
    kExitRegistry = 4,
};

// Runs the tool with argv-style arguments (args[0] is the program name).
// Reports go to `out` unless --out is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Scale names accepted by `sweep`, mapped to total dataset size in GB.
double scale_size_gb(const std::string& name);

} // namespace flcarbon
