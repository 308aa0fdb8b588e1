#pragma once

// Command-line front end.
//
//   qxfer <decay|mi|sweep|additivity|band> [--paper | --model FILE] [options]
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qxfer {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "QXFER_OUT_DIR";
inline constexpr std::uint64_t kDefaultSeed = 7;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "paper", "a:b:n" (n points from a to b inclusive) or "c1,c2,...".
std::vector<double> parse_coupling_list(const std::string& spec);

}  // namespace qxfer
