#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iongate::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNonConvergence = 3 };

/// Entry point of the `iongate` tool. Never throws; errors are printed to `err`
/// and mapped to an exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace iongate::cli
