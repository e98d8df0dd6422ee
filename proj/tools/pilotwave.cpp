// Command-line front end: pilotwave <subcommand> --config FILE [--out DIR]
// [--seed N] [--quiet]. Exit codes: 0 ok, 2 bad input, 3 numerical abort.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pilotwave/pilotwave.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Args {
    std::string config;
    std::string out = ".";
    std::int64_t seed = -1;
    bool quiet = false;
};

void add_common(CLI::App* sub, Args& args) {
    sub->add_option("--config", args.config, "scenario file (JSON, comments allowed)")->required();
    sub->add_option("--out", args.out, "output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "override the ensemble seed")->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", args.quiet, "suppress progress messages");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relativistic pilot-wave simulation lab (1+1D)"};
    app.set_version_flag("--version", std::string(pilotwave::kVersion));
    app.require_subcommand(1);
    Args args;
    using Runner = pilotwave::Json (*)(const pilotwave::ScenarioConfig&, const pilotwave::RunOptions&);
    Runner runner = nullptr;
    auto bind = [&](const char* name, const char* help, Runner r) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub, args);
        sub->callback([&runner, r] { runner = r; });
    };
    bind("evolve", "evolve the field and export field and current", pilotwave::run_evolve);
    bind("trajectory", "integrate a particle worldline with diagnostics", pilotwave::run_trajectory);
    bind("ensemble", "equivariance check for a guided ensemble", pilotwave::run_ensemble);
    bind("conserve", "energy-momentum bookkeeping", pilotwave::run_conserve);
    bind("classical", "classical particle testbeds", pilotwave::run_classical);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        const auto config = pilotwave::load_config(args.config);
        pilotwave::RunOptions options;
        options.out_dir = args.out;
        options.quiet = args.quiet;
        if (args.seed >= 0) options.seed = static_cast<std::uint64_t>(args.seed);
        const auto report = runner(config, options);
        if (!args.quiet) std::cout << report.dump(2) << '\n';
        return 0;
    } catch (const pilotwave::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const pilotwave::NumericalError& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
