#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vfsl::cli {

/// Exit status for argument errors; library errors exit with
/// kErrorExitBase + ErrorCode.
inline constexpr int kUsageExit = 2;
inline constexpr int kInternalExit = 1;
inline constexpr int kErrorExitBase = 10;

/// Runs one invocation; `args` excludes the program name. Errors are
/// reported on `err` as a single line "error: <Code>: <message>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vfsl::cli
