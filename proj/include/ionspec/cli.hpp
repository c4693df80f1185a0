#pragma once

#include <ostream>

namespace ionspec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitDivergence = 2;
inline constexpr int kExitIo = 3;

/// Subcommands: run, diagnose, spectrum, sweep, validate. Returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ionspec
