// hsk-sim: scenario runner, d_max sweep and connectivity bounds on the
// command line. See the README for the scenario grammar.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hsk/harness.hpp"

namespace {

std::pair<double, double> parse_area(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos)
        throw hsk::ConfigError("--area expects WIDTHxHEIGHT, e.g. 10x10");
    return {std::stod(text.substr(0, x)), std::stod(text.substr(x + 1))};
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) grid.push_back(std::stod(tok));
    }
    if (grid.empty()) throw hsk::ConfigError("--grid expects a comma list, e.g. 4,7,10");
    return grid;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, const std::string& mode,
            const std::string& format) {
    hsk::Scenario sc = hsk::load_scenario(scenario_path);
    if (seed) sc.seed = *seed;
    if (mode == "centralized") sc.mode = hsk::ProtocolMode::centralized;
    if (mode == "distributed") sc.mode = hsk::ProtocolMode::distributed;
    hsk::validate_scenario(sc);

    const bool write_csv = format == "csv" || format == "both";
    const bool write_dot = format == "dot" || format == "both";
    const auto written = hsk::run_scenario_to_files(sc, out_dir, write_csv, write_dot);
    for (const auto& path : written) std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep(std::uint64_t seed, int seeds, int nodes, const std::string& area,
              const std::string& grid, const std::string& out) {
    hsk::SweepConfig config;
    config.node_count = nodes;
    std::tie(config.area_w, config.area_h) = parse_area(area);

    const hsk::SweepResult result = hsk::sweep_dmax(seed, seeds, parse_grid(grid), config);
    for (const auto& point : result.points) {
        std::cout << "d_max=" << point.d_max << "  mean_redundant=" << point.mean_redundant
                  << "  stddev=" << point.stddev_redundant << "\n";
    }
    hsk::export_sweep_csv(result, out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_bounds(std::uint64_t seed, int nodes, const std::string& area) {
    const auto [w, h] = parse_area(area);
    const auto placement = hsk::random_placement(seed, nodes, w, h, 0.0, 100.0);
    const auto bounds = hsk::compute_connectivity_bounds(placement);
    std::cout << "d_low=" << bounds.d_low << " d_upper=" << bounds.d_upper << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HSK group key agreement protocols: scenario simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario file and export CSV/DOT");
    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    std::string mode_override;
    std::string format = "both";
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed_override, "override the scenario seed");
    run->add_option("--mode", mode_override, "override the scenario mode")
        ->check(CLI::IsMember({"centralized", "distributed"}));
    run->add_option("--format", format, "csv, dot or both")
        ->check(CLI::IsMember({"csv", "dot", "both"}));

    auto* sweep = app.add_subcommand("sweep", "Redundant-edge study over a d_max grid");
    std::uint64_t sweep_seed = 1;
    int sweep_seeds = 50;
    int sweep_nodes = 40;
    std::string sweep_area = "10x10";
    std::string sweep_grid = "4,5.5,7,8.5,10,12,15";
    std::string sweep_out = "sweep.csv";
    sweep->add_option("--seed", sweep_seed, "base seed");
    sweep->add_option("--seeds", sweep_seeds, "instances per grid point");
    sweep->add_option("--nodes", sweep_nodes, "nodes per instance");
    sweep->add_option("--area", sweep_area, "placement area WIDTHxHEIGHT");
    sweep->add_option("--grid", sweep_grid, "comma list of d_max values");
    sweep->add_option("--out", sweep_out, "output CSV path");

    auto* bounds = app.add_subcommand("bounds", "d_low/d_upper of a seeded placement");
    std::uint64_t bounds_seed = 1;
    int bounds_nodes = 40;
    std::string bounds_area = "10x10";
    bounds->add_option("--seed", bounds_seed, "placement seed");
    bounds->add_option("--nodes", bounds_nodes, "node count");
    bounds->add_option("--area", bounds_area, "placement area WIDTHxHEIGHT");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_path, out_dir, seed_override, mode_override, format);
        if (sweep->parsed())
            return cmd_sweep(sweep_seed, sweep_seeds, sweep_nodes, sweep_area, sweep_grid,
                             sweep_out);
        if (bounds->parsed()) return cmd_bounds(bounds_seed, bounds_nodes, bounds_area);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
