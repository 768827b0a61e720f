#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blp::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 2,
    kRuntimeError = 3,
};

/// Runs one `blp` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "BLP_OUTPUT_ROOT";

}  // namespace blp::cli
