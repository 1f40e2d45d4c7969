#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msqg/config.hpp"
#include "msqg/errors.hpp"
#include "msqg/scenario.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

// exit codes: 0 success, 1 config error, 2 runtime abort, 3 I/O error
constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeAbort = 2;
constexpr int kExitIoError = 3;

void print_validation(const msqg::ValidationResult& v) {
    for (const std::string& w : v.warnings) {
        std::cout << "warning: " << w << '\n';
    }
    for (const std::string& e : v.errors) {
        std::cout << "error: " << e << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"msqg: pseudo-vortex and particle laboratory for the generalized "
                 "surface quasi-geostrophic family"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir_override;
    std::string seed_override;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "execute a scenario described by a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--output-dir", output_dir_override, "override the configured output directory");
    run->add_option("--seed", seed_override, "override the configured random seed");
    run->add_option("--threads", threads, "worker threads for the velocity summation (0 = default)");

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
    validate->add_option("config", config_path, "config file")->required();

    CLI::App* scenarios = app.add_subcommand("scenarios", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    if (scenarios->parsed()) {
        for (const auto& [name, description] : msqg::scenario_catalog()) {
            std::cout << name << "\n    " << description << "\n";
        }
        return kExitOk;
    }

    msqg::ValidationResult validated;
    try {
        validated = msqg::load_config(config_path);
    } catch (const msqg::IoError& e) {
        std::cout << "io error: " << e.what() << '\n';
        return kExitIoError;
    }
    print_validation(validated);
    if (!validated.ok()) {
        return kExitConfigError;
    }

    if (validate->parsed()) {
        std::cout << "config ok: scenario " << msqg::scenario_name(validated.config->scenario)
                  << '\n';
        return kExitOk;
    }

    msqg::RunConfig config = *validated.config;
    if (!output_dir_override.empty()) config.output_dir = output_dir_override;
    if (!seed_override.empty()) {
        try {
            config.seed = std::stoull(seed_override);
        } catch (const std::exception&) {
            std::cout << "error: --seed expects an unsigned integer\n";
            return kExitConfigError;
        }
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif

    try {
        const msqg::RunReport report = msqg::run_scenario(config);
        std::cout << "outputs in " << config.output_dir << '\n';
        if (report.aborted) {
            std::cout << "aborted: " << report.abort_reason << '\n';
            return kExitRuntimeAbort;
        }
        for (const msqg::InvariantCheck& c : report.invariants) {
            std::cout << (c.pass ? "  [ok]   " : "  [FAIL] ") << c.name << '\n';
        }
        return kExitOk;
    } catch (const msqg::IoError& e) {
        std::cout << "io error: " << e.what() << '\n';
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cout << "runtime abort: " << e.what() << '\n';
        return kExitRuntimeAbort;
    }
}
