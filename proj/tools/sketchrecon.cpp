#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "coilsketch/cli/commands.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Coil-sketched MRI reconstruction experiments"};
    app.require_subcommand(1, 1);

    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> method;

    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "write phantom, maps, trajectory, weights and noisy k-space"},
        {"recon", "reconstruct the simulated data in --out with one method"},
        {"ablate", "sweep the virtual/sketched coil split over seeds"},
        {"gfactor", "Monte-Carlo inverse g-factor maps on Cartesian data"},
        {"bench", "convergence and image-quality comparison of all methods"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        // Existence is checked by the command so a missing file maps to the I/O exit code.
        sub->add_option("--config", config, "INI configuration file");
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "overrides the configured seed");
        sub->add_option("--method", method,
                        "baseline, coil-compression, accproxsgd or coil-sketching");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : coilsketch::kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return coilsketch::run_command(command, config, out, seed, method, std::cout, std::cerr);
}
