#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adthresh::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitAdaptSkipped = 3;

/// Entry point shared by the `adthresh` binary and the tests. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adthresh::cli
