#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scsl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr const char* kVersion = "0.1.0";

/// Entry point for the `scsl` tool. args[0] is the program name.
/// Returns 0 on success, 1 on validation errors (bad flags, bad input), 2 on
/// runtime failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace scsl::cli
