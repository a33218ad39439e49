#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mac {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

/// Entry point of the `mac-etd` tool; `args` is argv including the program name.
/// Diagnostics go to `err`, results to `out`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "0.1/2^0..5" (base halved k times for k in the range) or a comma-separated list.
std::vector<double> parse_tau_list(const std::string& text);

}  // namespace mac
