#pragma once

// Experiment runner behind the `nnadc` executable.
//
// Exit codes: 0 success, 1 training did not converge, 2 usage or config error.

#include <string>
#include <vector>

namespace nnadc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNonConvergence = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, const char* const* argv);

/// Convenience wrapper for tests: args exclude the program name.
int run(const std::vector<std::string>& args);

const char* version();

} // namespace nnadc::cli
