#pragma once

// Command-line front end. Exit codes: 0 pass (or inconclusive pass),
// 1 a separated violation, 2 usage or input error.

#include <iosfwd>
#include <string>
#include <vector>

namespace kronchaos {

inline constexpr int exit_pass = 0;
inline constexpr int exit_violation = 1;
inline constexpr int exit_usage = 2;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// KRONCHAOS_CACHE_DIR, else ./kronchaos-cache.
std::string default_cache_dir();

}  // namespace kronchaos
