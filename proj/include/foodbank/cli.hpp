#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace foodbank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitValidation = 3;

/// Runs the command line `args` (args[0] is the program name). Results go to
/// the --out file when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace foodbank::cli
