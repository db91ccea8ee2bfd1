#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vstab {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitNumeric = 1, kExitInput = 2 };

/// Runs the command line `args` (without the program name). Tables go to
/// `out` unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Range {
    double a = 0.0;
    double b = 0.0;
    int n = 0;
    std::vector<double> values() const;
};

/// Parses "a:b:n" (inclusive endpoints, n samples).
Range parse_range(const std::string& text, const std::string& option);

}  // namespace vstab
