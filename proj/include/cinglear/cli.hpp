#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cinglear::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitBudget = 3;

/// Runs one subcommand (synth, fit, forecast, backtest, diagnose).
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

std::string version_string();

} // namespace cinglear::cli
