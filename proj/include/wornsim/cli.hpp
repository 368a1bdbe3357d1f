#pragma once

#include <iosfwd>

namespace wornsim {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// wornsim run | metrics | validate | serve. Diagnostics go to `err` as a
/// single line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wornsim
