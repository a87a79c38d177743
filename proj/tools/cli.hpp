#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ces::cli {

inline constexpr const char* kToolName = "ces_demand";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitVerificationFailed = 2,
};

/// Entry point for every subcommand. args excludes the program name.
/// Results go to out (JSON, or CSV for `ball`), diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Verification thread cap from CES_DEMAND_THREADS; 0 when unset or invalid.
unsigned threads_from_environment();

}  // namespace ces::cli
