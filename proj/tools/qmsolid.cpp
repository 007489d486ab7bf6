// qmsolid command-line front end: run, compare and sweep configuration files.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qmsolid/driver.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Gas-solid pellet and packed-bed conversion solver"};
    app.require_subcommand(1);

    std::string out_dir;
    std::size_t seed_grid = 0;
    bool quiet = false;
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    app.add_option("--seed-grid", seed_grid, "Radial node count (overrides grid.n)");
    app.add_flag("--quiet", quiet, "Only report errors");
    app.fallthrough();

    std::string config;
    std::vector<std::string> specs;

    auto* run = app.add_subcommand("run", "Run a configuration");
    run->add_option("config", config, "Configuration file")->required();

    auto* compare = app.add_subcommand("compare", "Run the QM solver and the reference solver side by side");
    compare->add_option("config", config, "Configuration file")->required();

    auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
    sweep->add_option("config", config, "Configuration file")->required();
    sweep->add_option("spec", specs, "key=v1,v2,... (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : qmsolid::exit_config_error;
    }

    qmsolid::CliOverrides o;
    if (!out_dir.empty())
        o.out_dir = out_dir;
    if (seed_grid > 0)
        o.grid_nodes = seed_grid;
    o.quiet = quiet;

    if (*sweep)
        return qmsolid::sweep_command(config, specs, o, std::cout, std::cerr);
    o.force_compare = static_cast<bool>(*compare);
    return qmsolid::run_command(config, o, std::cout, std::cerr);
}
