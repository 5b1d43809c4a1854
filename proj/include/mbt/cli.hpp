#pragma once

// Command-line front end. Exit codes: 0 success, 1 test failures or
// violations, 2 usage, parse or model errors.

#include <iosfwd>
#include <string>
#include <vector>

namespace mbt::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailures = 1;
inline constexpr int kUsage = 2;

/// Runs one command. Reports go to `out` (or the -o file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mbt::cli
