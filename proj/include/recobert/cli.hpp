#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace recobert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 64;

inline constexpr const char* kToolVersion = "0.1.0";

/// Subcommands: synth, import-wines, build-vocab, train, embed, recommend,
/// evaluate, ablate. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace recobert::cli
