#pragma once

#include <iosfwd>

namespace ionflux {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitUsage = 64;

/// Runs one ionflux subcommand. `-` as a config path reads from `in`.
int cli_dispatch(int argc, const char* const* argv, std::istream& in, std::ostream& out,
                 std::ostream& err);

}  // namespace ionflux
