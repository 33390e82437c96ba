#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nurse_boa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Subcommands: generate, solve, dump-probs, oracle. Machine-readable output goes to
/// `out`, diagnostics to `err`. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace nurse_boa::cli
