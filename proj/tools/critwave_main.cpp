// critwave: scenario runner for the energy-critical wave lab.
//
//   critwave run <config.json> [--out DIR] [--seed N] [--threads K]
//   critwave report <artifacts-dir>
//
// Exit codes: 0 pass, 1 assertion failure, 2 usage error, 3 numeric failure.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "critwave/errors.hpp"
#include "critwave/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the focusing energy-critical wave equation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, report_dir;
    std::uint64_t seed = 1;
    int threads = 0;

    auto* run = app.add_subcommand("run", "execute a scenario from a JSON config");
    run->add_option("config", config_path, "path to the scenario config")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--seed", seed, "RNG seed for sampled points and perturbations");
    run->add_option("--threads", threads, "worker thread count (0 = library default)");

    auto* report = app.add_subcommand("report", "aggregate summaries into report.md");
    report->add_option("dir", report_dir, "directory holding scenario outputs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : critwave::scenario::kExitUsage;
    }

    try {
        if (run->parsed()) {
            critwave::scenario::RunOptions opt;
            opt.out_dir = out_dir;
            opt.seed = seed;
            opt.threads = threads;
            return critwave::scenario::run(config_path, opt);
        }
        return critwave::scenario::emit_report(report_dir);
    } catch (const critwave::scenario::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return critwave::scenario::kExitUsage;
    } catch (const critwave::numeric_error& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return critwave::scenario::kExitNumeric;
    } catch (const critwave::truncation_error& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return critwave::scenario::kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return critwave::scenario::kExitNumeric;
    }
}
