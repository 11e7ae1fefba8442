#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace battle::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kValidation = 2;
inline constexpr int kRuntime = 3;

/// Runs the `battle` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace battle::cli
