#include <doctest.h>

#include <cmath>

#include "hsk/rng.hpp"
#include "hsk/weighting.hpp"

using namespace hsk;

TEST_CASE("edge weight formula branches") {
    const WeightParams params{1000.0, 1.0, 2.0, 4.0};
    CHECK(std::isinf(edge_weight(5.0, 10.0, 20.0, params)));          // beyond the cutoff
    CHECK(edge_weight(3.0, 10.0, 20.0, params) == doctest::Approx(983.0));  // 1000 + 3 - 20
    const WeightParams p2{1000.0, 1.0, 1.0, 4.0};
    CHECK(edge_weight(0.0, 30.0, 30.0, p2) == doctest::Approx(1000.0 - 30.0));
}

TEST_CASE("edge weight rejects bad inputs and nonpositive results") {
    const WeightParams params{10.0, 1.0, 1.0, 4.0};
    CHECK_THROWS_AS(edge_weight(-1.0, 1.0, 1.0, params), ConfigError);
    CHECK_THROWS_AS(edge_weight(1.0, -1.0, 1.0, params), ConfigError);
    // 10 + 0 - 50 < 0: the configuration cannot cover these inputs
    CHECK_THROWS_AS(edge_weight(0.0, 50.0, 60.0, params), ConfigError);
}

TEST_CASE("weight is monotone in distance and min power") {
    const WeightParams params{1000.0, 1.0, 1.0, 50.0};
    SplitMix64 rng(99);
    for (int i = 0; i < 500; ++i) {
        const double d = rng.next_double(0.0, 50.0);
        const double pa_i = rng.next_double(0.0, 100.0);
        const double pa_j = rng.next_double(0.0, 100.0);
        const double w = edge_weight(d, pa_i, pa_j, params);
        CHECK(w > 0.0);

        const double d2 = rng.next_double(d, 50.0);
        CHECK(edge_weight(d2, pa_i, pa_j, params) >= w);

        const double lift = rng.next_double(0.0, 50.0);
        CHECK(edge_weight(d, pa_i + lift, pa_j + lift, params) <= w);
    }
}

TEST_CASE("validate_weight_function accepts the shipped form, rejects violations") {
    const WeightParams params{1000.0, 1.0, 1.0, 10.0};
    const WeightFunction shipped = [&](double d, double a, double b) {
        return edge_weight(d, a, b, params);
    };
    CHECK_NOTHROW(validate_weight_function(shipped, 10.0, 0.0, 100.0, 1));

    // Decreasing in distance: breaks the efficiency rule.
    const WeightFunction bad_d = [](double d, double, double) { return 100.0 - d; };
    CHECK_THROWS_AS(validate_weight_function(bad_d, 10.0, 0.0, 10.0, 1), ConfigError);

    // Increasing in min power: breaks the energy-balance rule.
    const WeightFunction bad_pa = [](double, double a, double b) {
        return 1.0 + std::min(a, b);
    };
    CHECK_THROWS_AS(validate_weight_function(bad_pa, 10.0, 0.0, 10.0, 1), ConfigError);

    // A compliant nonlinear plug-in passes.
    const WeightFunction nonlinear = [](double d, double a, double b) {
        return 1000.0 + d * d - std::sqrt(std::min(a, b));
    };
    CHECK_NOTHROW(validate_weight_function(nonlinear, 10.0, 0.0, 100.0, 1));
}

namespace {

NodeState node(NodeId id, double x, double y, double pa) {
    return NodeState{id, Vec2{x, y}, pa, 10.0};
}

}  // namespace

TEST_CASE("recompute_weights annotates every edge with a finite weight") {
    const Topology topo = build_topology(
        {node(1, 0, 0, 10), node(2, 3, 0, 20), node(3, 3, 4, 30)}, NetMode::homogeneous);
    const WeightParams params{1000.0, 1.0, 1.0, 10.0};
    const WeightedTopology w = recompute_weights(topo, params);
    REQUIRE(w.weights.size() == topo.edges().size());
    for (double value : w.weights) CHECK(std::isfinite(value));
    CHECK(w.weight_of(EdgeKey(1, 2)) == doctest::Approx(1000.0 + 3.0 - 10.0));
    CHECK(w.weight_of(EdgeKey(2, 3)) == doctest::Approx(1000.0 + 4.0 - 20.0));
    CHECK(w.weight_of(EdgeKey(1, 3)) == doctest::Approx(1000.0 + 5.0 - 10.0));
    CHECK_THROWS_AS(w.weight_of(EdgeKey(1, 9)), LookupError);
}

TEST_CASE("recompute_weights on an edgeless topology gives an empty map") {
    const Topology topo = build_topology({node(1, 0, 0, 10)}, NetMode::homogeneous);
    CHECK(recompute_weights(topo, WeightParams{1000, 1, 1, 10}).weights.empty());
}

TEST_CASE("raising one node's power never raises an incident weight") {
    const Topology before = build_topology(
        {node(1, 0, 0, 10), node(2, 3, 0, 20), node(3, 3, 4, 30)}, NetMode::homogeneous);
    const WeightParams params{1000.0, 1.0, 1.0, 10.0};
    const WeightedTopology w0 = recompute_weights(before, params);

    const Topology after = apply_event(before, NetworkEvent::power({{2, 80.0}}));
    const WeightedTopology w1 = recompute_weights(after, params);
    for (std::size_t i = 0; i < w0.weights.size(); ++i) CHECK(w1.weights[i] <= w0.weights[i]);
}

TEST_CASE("equal distance, higher min power pair weighs strictly less when beta > 0") {
    // (1,2) and (3,4) both at distance 2; the (3,4) pair is energy-richer.
    const Topology topo = build_topology({node(1, 0, 0, 10), node(2, 2, 0, 10),
                                          node(3, 0, 7, 90), node(4, 2, 7, 90)},
                                         NetMode::homogeneous);
    const WeightedTopology w = recompute_weights(topo, WeightParams{1000, 1, 1, 10});
    CHECK(w.weight_of(EdgeKey(3, 4)) < w.weight_of(EdgeKey(1, 2)));
}

TEST_CASE("recompute_weights is a pure function of the snapshot") {
    SplitMix64 rng(4);
    std::vector<NodeState> nodes;
    for (NodeId id = 1; id <= 10; ++id)
        nodes.push_back(node(id, rng.next_double(0, 10), rng.next_double(0, 10),
                             rng.next_double(0, 100)));
    const Topology topo = build_topology(nodes, NetMode::homogeneous);
    const WeightParams params{1000.0, 1.0, 1.0, 10.0};
    const WeightedTopology a = recompute_weights(topo, params);
    const WeightedTopology b = recompute_weights(topo, params);
    CHECK(a.weights == b.weights);
    CHECK(a.topo.edges() == b.topo.edges());
}
