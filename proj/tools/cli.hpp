// Command-line front end. Exit codes: 0 success, 1 usage, 2 data error.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace metatag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Environment variable holding the default seed.
inline constexpr const char* kSeedEnv = "METATAG_SEED";

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace metatag::cli
