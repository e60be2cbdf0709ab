// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

namespace cincgan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

// Entry point of the `cincgan` tool. args[0] is the program name.
// Subcommands: mix, manifest, train-mcgan, train-cincgan, enhance, evaluate.
// Returns 0 on success, 1 on a usage error and 2 on a runtime failure.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace cincgan::cli
