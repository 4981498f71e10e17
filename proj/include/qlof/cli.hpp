#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qlof {

enum ExitCode : int {
    kExitOk = 0,
    kExitContract = 1,
    kExitConfig = 2,
    kExitIo = 3,
    kExitDegenerate = 4,
    kExitCapacity = 5,
    kExitNearThreshold = 6,
};

enum class LogLevel { error, warn, info, debug };

/// Reads LOG_LEVEL (error, warn, info, debug); anything else means warn.
LogLevel log_level_from_env();

/// Runs one invocation; args exclude the program name. Reports go to files
/// named by --out, or to `out` when it is absent. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qlof
