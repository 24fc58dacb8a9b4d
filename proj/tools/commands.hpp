#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace platoon::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Runs the command line `args` (without the program name), writing results
/// to `out` and diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// CSV header emitted by `sweep`.
inline constexpr const char* kSweepHeader =
    "lambda,policy,n_star,mean_utility,ci_utility,mean_platoon_len,ci_platoon_len,"
    "mean_wait_steps,ci_wait_steps,vehicles,platoons";

}  // namespace platoon::cli
