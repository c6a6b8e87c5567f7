#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace drm::cli {

// Exit codes of the densratio tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,         // bad flags, unreadable input, parse errors
  kNonexistence = 2,  // unpenalized estimate does not exist
  kSingular = 3,      // a required linear system is singular
};

// Runs the tool on argv-style arguments (args[0] is the program name).
// Reports and tables go to `out` unless --output names a file; diagnostics go
// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "a:b:step" into the inclusive grid a, a+step, ..., b.
std::vector<double> parse_grid(const std::string& text);

}  // namespace drm::cli
