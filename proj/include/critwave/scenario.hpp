#ifndef CRITWAVE_SCENARIO_HPP
#define CRITWAVE_SCENARIO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace critwave::scenario {

// Exit codes shared by the library entry points and the CLI.
inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

struct RunOptions {
    std::string out_dir;     // overrides the config's "out"
    std::uint64_t seed = 1;  // perturbation / sampling RNG seed
    int threads = 0;         // 0 keeps the OpenMP default
};

// Configuration errors (malformed JSON, unknown scenario, bad fields).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Executes the scenario named in the JSON config, writes summary.json (plus
// CSV series and SVG charts) into the output directory, and returns an exit
// code. Throws config_error for unusable configs.
int run(const std::string& config_path, const RunOptions& opt);

// Aggregates every */summary.json below artifacts_dir into report.md.
int emit_report(const std::string& artifacts_dir);

}  // namespace critwave::scenario

#endif
