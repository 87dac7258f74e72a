#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsk/metrics.hpp"
#include "hsk/net_model.hpp"
#include "hsk/scenario.hpp"
#include "hsk/spanning.hpp"

namespace hsk {

// Uniform positions and power draws from the placement stream of `seed`.
// Transmission ranges are left at zero; the caller assigns them by mode.
std::vector<NodeState> random_placement(std::uint64_t seed, int n, double area_w, double area_h,
                                        double pa_min, double pa_max);

struct ConnectivityBounds {
    double d_low = 0.0;    // longest edge of the Euclidean MST
    double d_upper = 0.0;  // max pairwise distance
};

ConnectivityBounds compute_connectivity_bounds(std::span<const NodeState> nodes);

struct RunResult {
    std::vector<MetricsReport> reports;
    std::vector<NodeState> final_nodes;
    std::vector<EdgeKey> final_edges;       // secure-link graph of the last round
    std::vector<EdgeKey> final_tree_edges;  // spanning subset, for DOT styling
};

// Executes the bootstrap round plus every scheduled event through the
// selected protocol. Disconnection aborts become flagged rows; the run
// continues with the next event.
RunResult run_scenario(const Scenario& sc);

struct SweepInstance {
    std::uint64_t seed = 0;       // placement seed actually used
    double d_low = 0.0;
    double d_upper = 0.0;
    std::size_t redundant = 0;
    int redraws = 0;
    bool skipped = false;  // retry cap exhausted
};

struct SweepPoint {
    double d_max = 0.0;
    double mean_redundant = 0.0;
    double stddev_redundant = 0.0;
    std::vector<SweepInstance> instances;
};

struct SweepConfig {
    int node_count = 40;
    double area_w = 10.0;
    double area_h = 10.0;
    double pa_min = 0.0;
    double pa_max = 100.0;
    double weight_m = 1000.0;
    double weight_alpha = 1.0;
    // The redundancy study ranks edges by distance (beta = 0): with the
    // battery term active the superposition densifies far beyond the
    // reference counts. Protocol scenarios keep their own beta.
    double weight_beta = 0.0;
    int max_redraws = 100;
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepPoint> points;  // sorted by d_max
};

// Redundant-edge study: for every grid value and seed, place nodes (redrawn
// while disconnected at that range, up to the cap), run one distributed
// bootstrap (the k=0 LSTs are true neighborhood MSTs) and record the
// redundant edge count of the superposition.
SweepResult sweep_dmax(std::uint64_t base_seed, int seed_count, std::vector<double> grid,
                       const SweepConfig& config = {});

// DOT with coordinates; edges in tree_edges solid, the rest dashed.
void export_dot(std::span<const NodeState> nodes, std::span<const EdgeKey> edges,
                std::span<const EdgeKey> tree_edges, const std::string& path);

void export_csv(std::span<const MetricsReport> reports, const std::string& path);
std::vector<MetricsReport> import_csv(const std::string& path);

void export_sweep_csv(const SweepResult& result, const std::string& path);

// What the CLI `run` subcommand does: run the scenario and write
// metrics.csv / final.dot under out_dir. Returns the paths written.
std::vector<std::string> run_scenario_to_files(const Scenario& sc, const std::string& out_dir,
                                               bool write_csv, bool write_dot);

}  // namespace hsk
