#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sinv::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNegative = 2;  // not invertible / no placement possible

/// Seed used when neither --seed nor SINV_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 20240607;

/// Runs the command line `args` (without the program name). Structured
/// results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a node list: comma-separated integers, or else the path of a file
/// with one id per line ('#' comments allowed). Throws Error(ParseError).
std::vector<long long> parse_node_list(const std::string& spec);

}  // namespace sinv::cli
