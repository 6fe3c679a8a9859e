#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace gptw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNotConverged = 3;

/// Runs one command line (argv[0] is the program name). Diagnostics go to
/// `err`, summaries to `out`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses `key = value` lines; `#` starts a comment. Throws InvalidArgument
/// on a malformed line or an unknown key.
std::map<std::string, std::string> parse_config(std::istream& is);

}  // namespace gptw::cli
