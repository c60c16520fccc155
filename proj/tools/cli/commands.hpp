#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace evrng::cli {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    unsigned threads = 1;
    bool strict_ledger = false;
    bool trace = false;
    /// audit only: two run files to compare instead of running a config.
    std::vector<std::string> inputs;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAssertion = 3;

/// Runs one subcommand. Returns the process exit code; diagnostics go to `err`.
int run_command(std::string_view name, const CliOptions& options, std::ostream& out, std::ostream& err);

} // namespace evrng::cli
