#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smoothdisc::cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2 };

/// Runs the command line `args` (without the program name). Progress and
/// summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smoothdisc::cli
