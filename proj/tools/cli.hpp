#pragma once

#include <iosfwd>

namespace numrange::cli {

// Exit codes of the command-line front end.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kInfeasible = 3;
inline constexpr int kBreakdown = 4;

// Runs one invocation; messages go to `out` and `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace numrange::cli
