#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rg::bench {

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitEstimationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Subcommands estimate, synth, bench and metrics. `args` excludes the
/// program name. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker threads for `bench`: RG_THREADS when set to a positive integer,
/// otherwise the OpenMP default.
int bench_threads();

}  // namespace rg::bench
