#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nsaflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Entry point of the `nsaflow` tool. `args` excludes the program name.
/// Subcommands: optimize, spca, sweep, generate.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsaflow
