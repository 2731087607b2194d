// Command-line front end: density sweeps, scheme comparisons and the
// self-check report, driven by an experiment configuration file.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "udn/experiment.hpp"

namespace {

enum ExitCode : int { ok = 0, validation_failed = 1, config_error = 2, numeric_failure = 3 };

struct Options {
    std::string config;
    std::string output;
    std::optional<std::uint64_t> mc_trials;
    std::optional<std::uint64_t> seed;
};

udn::ExperimentConfig load(const Options& opts) {
    auto cfg = udn::load_config(opts.config);
    if (!opts.output.empty()) {
        cfg.output_path = opts.output;
    }
    if (opts.mc_trials) {
        cfg.trials = *opts.mc_trials;
    }
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    return cfg;
}

// Writes via a temporary file so a failed run never leaves a partial CSV.
void write_rows(const std::string& path, const std::vector<udn::CsvRow>& rows) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw udn::ConfigError(path + ": cannot open output file");
        }
        udn::write_csv(out, rows);
        if (!out) {
            throw udn::ConfigError(path + ": write failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

int run(const std::string& command, const Options& opts) {
    try {
        const auto cfg = load(opts);
        if (command == "sweep") {
            write_rows(cfg.output_path, udn::run_sweep(cfg));
            std::cerr << "wrote " << cfg.output_path << '\n';
            return ok;
        }
        if (command == "compare") {
            write_rows(cfg.output_path, udn::run_sweep(cfg));
            udn::write_summary(std::cout,
                               udn::critical_density_summary(cfg, udn::CoverageMethod::exact));
            std::cerr << "wrote " << cfg.output_path << '\n';
            return ok;
        }
        const auto report = udn::validate(cfg);
        udn::write_report(std::cout, report);
        return report.passed() ? ok : validation_failed;
    } catch (const udn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const udn::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const udn::Error& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return numeric_failure;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coverage, spatial throughput and critical density of SDMA ultra-dense networks"};
    app.require_subcommand(1);

    Options opts;
    auto add_common = [&opts](CLI::App* sub) {
        sub->add_option("--config", opts.config, "Experiment configuration file")->required();
        sub->add_option("--output", opts.output, "CSV output path (overrides [output] path)");
        sub->add_option("--mc-trials", opts.mc_trials, "Monte Carlo trials per point (overrides [mc] trials)");
        sub->add_option("--seed", opts.seed, "Monte Carlo master seed (overrides [mc] seed)");
    };
    add_common(app.add_subcommand("sweep", "Coverage and throughput over a density sweep"));
    add_common(app.add_subcommand("compare", "Sweep several served-user counts and report critical densities"));
    add_common(app.add_subcommand("validate", "Run the analytic and Monte Carlo self-checks"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }
    return run(app.get_subcommands().front()->get_name(), opts);
}
