#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vwsd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one command line. `args` excludes the program name. Reports go to files, human-readable
/// summaries to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vwsd::cli
