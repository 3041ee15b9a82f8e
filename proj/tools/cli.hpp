#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ballvault::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_data = 3;

/// Runs one `ballvault` invocation. `args` excludes the program name.
/// Results go to `out` unless an -o path is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ballvault::cli
