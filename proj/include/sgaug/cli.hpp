#pragma once

#include <string>
#include <vector>

namespace sgaug::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;  // I/O, network, environment
inline constexpr int kExitUsage = 2;    // bad flags or invalid input data

// Runs one subcommand. args[0] is the program name.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace sgaug::cli
