#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsk/harness.hpp"
#include "hsk/protocol_centralized.hpp"
#include "hsk/protocol_distributed.hpp"
#include "oracles.hpp"

using namespace hsk;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("hsk_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

const char* kSmallDistributed = R"(hsk-scenario v1
seed = 11
nodes = 12
area = 10 10
mode = distributed
d_max = 5
weights = 1000 1 1
pa_range = 0 100
primitive = test-double
events:
  join random
  leave random
end
)";

}  // namespace

TEST_CASE("random placement replays for a seed and respects the ranges") {
    const auto a = random_placement(5, 20, 10, 8, 10, 90);
    const auto b = random_placement(5, 20, 10, 8, 10, 90);
    REQUIRE(a.size() == 20);
    CHECK(a == b);
    CHECK(random_placement(6, 20, 10, 8, 10, 90) != a);

    for (const NodeState& n : a) {
        CHECK(n.position.x >= 0);
        CHECK(n.position.x < 10);
        CHECK(n.position.y >= 0);
        CHECK(n.position.y < 8);
        CHECK(n.power_available >= 10);
        CHECK(n.power_available < 90);
    }
    CHECK(random_placement(1, 1, 10, 10, 0, 100).size() == 1);
    CHECK_THROWS_AS(random_placement(1, 0, 10, 10, 0, 100), ConfigError);
}

TEST_CASE("mean nearest-neighbour distance matches the Monte-Carlo oracle") {
    double total = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        const auto nodes = random_placement(seed, 40, 10, 10, 0, 100);
        for (const NodeState& a : nodes) {
            double best = std::numeric_limits<double>::infinity();
            for (const NodeState& b : nodes) {
                if (a.id == b.id) continue;
                best = std::min(best, distance(a.position, b.position));
            }
            total += best;
            count += 1;
        }
    }
    const double empirical = total / static_cast<double>(count);
    const double expected = oracle::mc_mean_nearest_neighbor(40, 10, 10, 150, 99);
    CHECK(empirical == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("edge density of the reference-scale instance is in the expected band") {
    // 40 nodes, 10x10, d_max = 4: single instances land around ~270 edges
    // (the reference instance had 295); the seed-averaged mean is stable.
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto nodes = random_placement(seed, 40, 10, 10, 0, 100);
        for (NodeState& n : nodes) n.transmission_range = 4.0;
        total += static_cast<double>(build_topology(nodes, NetMode::homogeneous).edges().size());
    }
    const double mean = total / 20.0;
    CHECK(mean > 230.0);
    CHECK(mean < 310.0);
}

TEST_CASE("connectivity bounds for hand-checked placements") {
    std::vector<NodeState> two{NodeState{1, {0, 0}, 0, 1}, NodeState{2, {0, 3}, 0, 1}};
    const auto b2 = compute_connectivity_bounds(two);
    CHECK(b2.d_low == doctest::Approx(3.0));
    CHECK(b2.d_upper == doctest::Approx(3.0));

    std::vector<NodeState> line{NodeState{1, {0, 0}, 0, 1}, NodeState{2, {1, 0}, 0, 1},
                                NodeState{3, {5, 0}, 0, 1}};
    const auto b3 = compute_connectivity_bounds(line);
    CHECK(b3.d_low == doctest::Approx(4.0));
    CHECK(b3.d_upper == doctest::Approx(5.0));

    CHECK_THROWS_AS(compute_connectivity_bounds(std::vector<NodeState>{two[0]}), Error);
}

TEST_CASE("d_low equals the brute-force threshold over sorted pair distances") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto nodes = random_placement(seed, 20, 10, 10, 0, 100);
        const auto bounds = compute_connectivity_bounds(nodes);

        std::vector<std::pair<double, double>> points;
        for (const NodeState& n : nodes) points.emplace_back(n.position.x, n.position.y);
        CHECK(bounds.d_low == doctest::Approx(oracle::connectivity_threshold(points)));
    }
}

TEST_CASE("scenario parser round-trips a full file") {
    const Scenario sc = parse_scenario(R"(hsk-scenario v1
# full-feature example
seed = 99
nodes = 8
area = 12 6
mode = centralized
d_leader = 20
d_normal = 4
weights = 500 2 3
pa_range = 10 60
primitive = finite-field
session_key_bytes = 16
rekey_on_edge_events = true
events:
  join random 2
  join 77 1.5 2.5 30
  leave 77
  leave random
  move 3 0.5 0.5
  move random 2
  power 3 55
  power random
end
)");
    CHECK(sc.seed == 99);
    CHECK(sc.node_count == 8);
    CHECK(sc.area_w == 12);
    CHECK(sc.area_h == 6);
    CHECK(sc.mode == ProtocolMode::centralized);
    CHECK(*sc.d_leader == 20);
    CHECK(*sc.d_normal == 4);
    CHECK(sc.weight_m == 500);
    CHECK(sc.weight_beta == 3);
    CHECK(sc.pa_min == 10);
    CHECK(sc.pa_max == 60);
    CHECK(sc.primitive == "finite-field");
    CHECK(sc.session_key_bytes == 16);
    CHECK(sc.rekey_on_edge_events);
    REQUIRE(sc.schedule.size() == 8);
    CHECK(sc.schedule[0].action == ScheduledEvent::Action::join_random);
    CHECK(sc.schedule[0].count == 2);
    CHECK(sc.schedule[1].action == ScheduledEvent::Action::join_explicit);
    CHECK(sc.schedule[1].id == 77);
    CHECK(sc.schedule[1].value == 30);
    CHECK(sc.schedule[4].position.x == 0.5);
    CHECK(sc.range_cutoff() == 4);
}

TEST_CASE("scenario parser rejects malformed input") {
    CHECK_THROWS_AS(parse_scenario(""), ConfigError);
    CHECK_THROWS_AS(parse_scenario("not-a-scenario\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("hsk-scenario v1\nbogus_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("hsk-scenario v1\nnodes = 3\narea = 10 10\nmode = distributed\n"
                                   "d_max = 4\nevents:\n  join random\n"),
                    ConfigError);  // missing end
    CHECK_THROWS_AS(parse_scenario("hsk-scenario v1\nnodes = 3\narea = 10 10\n"
                                   "mode = centralized\nd_max = 4\nevents:\nend\n"),
                    ConfigError);  // centralized without leader ranges
    CHECK_THROWS_AS(parse_scenario("hsk-scenario v1\nnodes = 3\narea = 10 10\n"
                                   "mode = distributed\nd_max = 4\nweights = 50 1 1\n"
                                   "pa_range = 0 100\nevents:\nend\n"),
                    ConfigError);  // M <= beta * pa_max
    CHECK_THROWS_AS(parse_scenario("hsk-scenario v1\nnodes = 3\narea = 10 10\n"
                                   "mode = distributed\nd_max = 4\nprimitive = rot13\n"
                                   "events:\nend\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario("hsk-scenario v1\nnodes = 3\narea = 10 10\n"
                                   "mode = distributed\nd_max = 4\nevents:\n  explode 3\nend\n"),
                    ConfigError);
}

TEST_CASE("empty schedule runs exactly the bootstrap round") {
    Scenario sc = parse_scenario("hsk-scenario v1\nseed = 3\nnodes = 10\narea = 10 10\n"
                                 "mode = distributed\nd_max = 6\n");
    const RunResult result = run_scenario(sc);
    REQUIRE(result.reports.size() == 1);
    CHECK(result.reports[0].round == 0);
    CHECK(result.reports[0].event_kind == "bootstrap");
    CHECK(result.reports[0].epoch == 1);
}

TEST_CASE("one join plus one leave gives three rounds with epochs 1,2,3") {
    const Scenario sc = parse_scenario(kSmallDistributed);
    const RunResult result = run_scenario(sc);
    REQUIRE(result.reports.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK_FALSE(result.reports[i].aborted);
        CHECK(result.reports[i].epoch == static_cast<int>(i + 1));
        CHECK(result.reports[i].round == static_cast<int>(i));
    }
}

TEST_CASE("run_scenario is replayable") {
    const Scenario sc = parse_scenario(kSmallDistributed);
    const RunResult a = run_scenario(sc);
    const RunResult b = run_scenario(sc);
    REQUIRE(a.reports.size() == b.reports.size());
    for (std::size_t i = 0; i < a.reports.size(); ++i) CHECK(a.reports[i] == b.reports[i]);
    CHECK(a.final_edges == b.final_edges);
}

TEST_CASE("centralized and distributed agree on a tree topology") {
    // Unit-spaced line; both edge rules give exactly the path, the repaired
    // tree is the path, and the LST superposition is the path as well.
    std::vector<NodeState> central{NodeState{1, {0, 0}, 50, 100}};
    std::vector<NodeState> dist{NodeState{1, {0, 0}, 50, 1.5}};
    for (NodeId id = 2; id <= 6; ++id) {
        const Vec2 pos{static_cast<double>(id - 1), 0.0};
        central.push_back(NodeState{id, pos, 50, 1.5});
        dist.push_back(NodeState{id, pos, 50, 1.5});
    }
    const WeightParams params{1000, 1, 1, 1.5};

    CentralizedProtocol cp(central, params, 77);
    const MetricsReport rc = cp.run_bootstrap();
    DistributedProtocol dp(dist, params, 77);
    const MetricsReport rd = dp.run_bootstrap();

    CHECK(cp.state().tree->edges == dp.state().superposed->edges);
    CHECK(rc.new_exchanges == rd.new_exchanges);
    CHECK(rd.redundant_edges == 0);
}

TEST_CASE("metrics CSV round-trips field for field") {
    const Scenario sc = parse_scenario(kSmallDistributed);
    const RunResult result = run_scenario(sc);
    const auto dir = temp_dir("csv");
    const std::string path = (dir / "metrics.csv").string();
    export_csv(result.reports, path);

    const auto back = import_csv(path);
    REQUIRE(back.size() == result.reports.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == result.reports[i]);

    CHECK_THROWS_AS(export_csv(result.reports, (dir / "nope" / "x.csv").string()), Error);
    CHECK_THROWS_AS(import_csv((dir / "missing.csv").string()), Error);
}

TEST_CASE("DOT export styles tree and redundant edges distinctly") {
    const auto dir = temp_dir("dot");

    // Empty graph is still a valid DOT file.
    const std::string empty_path = (dir / "empty.dot").string();
    export_dot({}, {}, {}, empty_path);
    const std::string empty_dot = slurp(empty_path);
    CHECK(empty_dot.find("graph") != std::string::npos);

    std::vector<NodeState> nodes{NodeState{1, {0, 0}, 0, 1}, NodeState{2, {1, 0}, 0, 1},
                                 NodeState{3, {1, 1}, 0, 1}};
    const std::vector<EdgeKey> edges{EdgeKey(1, 2), EdgeKey(1, 3), EdgeKey(2, 3)};
    const std::vector<EdgeKey> tree{EdgeKey(1, 2), EdgeKey(1, 3)};
    const std::string path = (dir / "tri.dot").string();
    export_dot(nodes, edges, tree, path);
    const std::string dot = slurp(path);
    CHECK(dot.find("1 -- 2;") != std::string::npos);
    CHECK(dot.find("2 -- 3 [style=dashed") != std::string::npos);  // the redundant edge
    CHECK(dot.find("pos=\"") != std::string::npos);

    // A tree exports exactly n-1 edge lines, none of them dashed.
    const std::string tree_path = (dir / "tree.dot").string();
    export_dot(nodes, tree, tree, tree_path);
    const std::string tree_dot = slurp(tree_path);
    CHECK(tree_dot.find("dashed") == std::string::npos);
}

TEST_CASE("scenario files and exports are byte-stable") {
    const Scenario sc = parse_scenario(kSmallDistributed);
    const auto dir_a = temp_dir("runA");
    const auto dir_b = temp_dir("runB");
    run_scenario_to_files(sc, dir_a.string(), true, true);
    run_scenario_to_files(sc, dir_b.string(), true, true);
    CHECK(slurp((dir_a / "metrics.csv").string()) == slurp((dir_b / "metrics.csv").string()));
    CHECK(slurp((dir_a / "final.dot").string()) == slurp((dir_b / "final.dot").string()));
}

TEST_CASE("a small sweep behaves sanely") {
    SweepConfig config;
    config.node_count = 10;
    const SweepResult result = sweep_dmax(9, 3, {20.0, 3.0}, config);
    REQUIRE(result.points.size() == 2);
    CHECK(result.points[0].d_max == 3.0);  // sorted ascending
    CHECK(result.points[1].d_max == 20.0);

    for (const SweepInstance& inst : result.points[1].instances) {
        REQUIRE_FALSE(inst.skipped);
        CHECK(inst.d_low <= inst.d_upper);
        // 20 covers the whole 10x10 box: complete graph, LMST superposition
        // is the MST.
        CHECK(inst.redundant == 0);
    }

    const auto dir = temp_dir("sweep");
    const std::string path = (dir / "sweep.csv").string();
    export_sweep_csv(result, path);
    CHECK(slurp(path).find("d_max,instances") == 0);
}
