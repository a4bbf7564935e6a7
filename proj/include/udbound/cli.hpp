#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace udbound::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kNotConverged = 3;
inline constexpr int kInfeasible = 4;
}  // namespace exit_code

/// Runs one `udbound` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace udbound::cli
