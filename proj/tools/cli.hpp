#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace arnagg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // bad flags, invalid input or configuration
inline constexpr int kExitNumerical = 3;  // NoConvergence, ComplexStationary, ...

/// Runs one command line (args[0] is the program name). Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "A..B[..step]" and comma lists, e.g. "0,5,10..20..5".
std::vector<std::size_t> parse_index_list(const std::string& text);

/// Worker count for independent jobs: ARNAGG_THREADS if set, else the
/// hardware concurrency.
unsigned thread_budget();

}  // namespace arnagg::cli
