// Command-line front end: decompose, simulate, equilibrium, indices.

#include "wavekin/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
    std::string config;
    std::string output;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--output", args.output, "Output directory (overrides output_dir)");
    cmd->add_option("--set", args.sets, "Override a config field, e.g. --set sim.t_end=50")->take_all();
}

wavekin::RunConfig resolve(const CommonArgs& args)
{
    std::vector<std::string> overrides = args.sets;
    if (!args.output.empty()) overrides.push_back("output_dir=\"" + args.output + "\"");
    std::optional<std::filesystem::path> path;
    if (!args.config.empty()) path = args.config;
    return wavekin::load_config(path, overrides);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete three-wave kinetic equation on the periodic lattice"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* decompose = app.add_subcommand("decompose", "Triad enumeration and region decomposition");
    auto* simulate = app.add_subcommand("simulate", "Integrate the kinetic equation");
    auto* equilibrium = app.add_subcommand("equilibrium", "Solve the local equilibria of every region");
    auto* indices = app.add_subcommand("indices", "Index functionals at random interior points");
    for (auto* cmd : {decompose, simulate, equilibrium, indices}) add_common(cmd, args);

    CLI11_PARSE(app, argc, argv);

    try {
        const wavekin::RunConfig cfg = resolve(args);
        if (decompose->parsed()) wavekin::run_decompose(cfg);
        if (simulate->parsed()) wavekin::run_simulate(cfg);
        if (equilibrium->parsed()) wavekin::run_equilibrium(cfg);
        if (indices->parsed()) wavekin::run_indices(cfg);
    } catch (const wavekin::StepFailure& e) {
        std::cerr << "wavekin: integration failed at t=" << e.time() << ": " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "wavekin: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
