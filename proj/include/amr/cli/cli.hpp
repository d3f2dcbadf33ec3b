#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace amr::cli {

inline constexpr const char* kToolVersion = "1.0.0";
/// Default directory for corpora and run directories when no path is given.
inline constexpr const char* kDataDirEnv = "AMRBENCH_DATA_DIR";

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Everything random in one command derives from the single --seed.
struct Seeds {
  std::uint64_t master = 0;
  std::uint64_t split = 0;  // stratified split shuffle
  std::uint64_t init = 0;   // model initialization
  std::uint64_t train = 0;  // trainer (shuffle order, dropout masks, curriculum seeds)
};
Seeds expand_seeds(std::uint64_t seed);

/// Parses and executes one command line; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace amr::cli
