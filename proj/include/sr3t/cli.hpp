#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sr3t::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one command. args excludes the program name. Every error is caught
/// and mapped to an exit code; the message goes to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sr3t::cli
