#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "hsk/protocol_distributed.hpp"
#include "oracles.hpp"

using namespace hsk;

namespace {

NodeState node(NodeId id, double x, double y, double range) {
    return NodeState{id, Vec2{x, y}, 50.0, range};
}

std::vector<NodeState> unit_path(int n, double range = 1.2) {
    std::vector<NodeState> nodes;
    for (int i = 1; i <= n; ++i)
        nodes.push_back(node(static_cast<NodeId>(i), static_cast<double>(i), 0.0, range));
    return nodes;
}

WeightParams params_for(double cutoff) { return WeightParams{1000.0, 1.0, 1.0, cutoff}; }

// n-cycle superposed graph with every edge keyed.
std::pair<SuperposedGraph, SecureLinkStore> keyed_ring(int n, SplitMix64& rng,
                                                       const KeyExchangePrimitive& kx) {
    SuperposedGraph g;
    SecureLinkStore store;
    for (int i = 1; i <= n; ++i) g.nodes.push_back(static_cast<NodeId>(i));
    for (int i = 1; i <= n; ++i) {
        const NodeId a = static_cast<NodeId>(i);
        const NodeId b = static_cast<NodeId>(i % n + 1);
        g.edges.emplace_back(a, b);
    }
    std::sort(g.edges.begin(), g.edges.end());
    store.establish_for_edges(g.edges, kx, rng, 0);
    return {std::move(g), std::move(store)};
}

}  // namespace

TEST_CASE("a tree topology superposes to itself") {
    DistributedProtocol protocol(unit_path(5), params_for(1.2), 42);
    const MetricsReport r = protocol.run_bootstrap();

    CHECK(r.hello == 5);
    CHECK(r.weight_msg == 5);
    CHECK(r.id_msg == 0);  // no global leader to report to
    CHECK(r.redundant_edges == 0);
    CHECK(r.duplicates == 0);
    CHECK(r.key_payload == 4);
    CHECK(r.new_exchanges == 4);
    CHECK(r.epoch == 1);

    const auto& st = protocol.state();
    REQUIRE(st.superposed.has_value());
    CHECK(st.superposed->edges == st.topo.edges());
    CHECK(st.store.edge_keys() == st.superposed->edges);
}

TEST_CASE("complete topology under LMST superposes to the global MST") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<NodeState> nodes;
        const int n = 5 + static_cast<int>(rng.next_below(6));
        for (int i = 1; i <= n; ++i)
            nodes.push_back(node(static_cast<NodeId>(i), rng.next_double(0, 10),
                                 rng.next_double(0, 10), 100.0));
        DistributedProtocol protocol(nodes, params_for(100.0), rng.next());
        const MetricsReport r = protocol.run_bootstrap();

        const auto& st = protocol.state();
        const WeightedTopology wt = recompute_weights(st.topo, params_for(100.0));
        CHECK(st.superposed->edges == kruskal_mst(wt).edges);
        CHECK(r.redundant_edges == 0);
        CHECK(r.new_exchanges == static_cast<std::uint64_t>(n - 1));
    }
}

TEST_CASE("only neighborhoods that contained the departed node rebuild") {
    DistributedProtocol protocol(unit_path(6), params_for(1.2), 3);
    protocol.run_bootstrap();
    CHECK(protocol.state().lst_rebuilds == 6);

    // Node 6 is inside the neighborhoods of 5 and 6 only.
    const MetricsReport r = protocol.run_round(NetworkEvent::leave({6}));
    CHECK_FALSE(r.aborted);
    CHECK(protocol.state().lst_rebuilds == 1);  // node 5's neighborhood
    CHECK(protocol.state().lsts.count(6) == 0);

    // A pure power update on a non-member of most neighborhoods.
    const MetricsReport r2 = protocol.run_round(NetworkEvent::power({{1, 80.0}}));
    CHECK_FALSE(r2.aborted);
    CHECK(protocol.state().lst_rebuilds == 2);  // neighborhoods of 1 and 2
}

TEST_CASE("edge events keep the epoch, node events advance it") {
    DistributedProtocol protocol(unit_path(5), params_for(1.2), 5);
    protocol.run_bootstrap();
    CHECK(protocol.run_round(NetworkEvent::power({{2, 1.0}})).epoch == 1);
    CHECK(protocol.run_round(NetworkEvent::join({node(7, 1.0, 0.5, 1.2)})).epoch == 2);
    CHECK(protocol.run_round(NetworkEvent::leave({7})).epoch == 3);
}

TEST_CASE("select_initiator is seeded, uniform and total") {
    CHECK(select_initiator({9}, 123) == 9);
    CHECK(select_initiator({3, 5, 8}, 77) == select_initiator({8, 5, 3}, 77));
    CHECK_THROWS_AS(select_initiator({}, 1), Error);

    const std::vector<NodeId> members{1, 2, 3, 4, 5};
    std::map<NodeId, int> counts;
    for (std::uint64_t seed = 0; seed < 10000; ++seed)
        counts[select_initiator(members, seed)] += 1;
    REQUIRE(counts.size() == 5);
    for (const auto& [id, count] : counts) {
        CHECK(count > 1800);  // 2000 +- 200 at 10000 draws
        CHECK(count < 2200);
    }
}

TEST_CASE("ring flood: one duplicate, full delivery, BFS depths") {
    const auto kx = make_key_exchange("test-double");
    const auto cipher = make_cipher("xor-siv");
    for (int n = 3; n <= 10; ++n) {
        CAPTURE(n);
        SplitMix64 rng(static_cast<std::uint64_t>(n));
        auto [ring, store] = keyed_ring(n, rng, *kx);
        const SessionKey sk = generate_session_key(rng, 1);

        const DeliveryReport rep = flood_session_key(ring, 1, store, *cipher, sk);
        CHECK(rep.duplicates == 1);
        CHECK(rep.depth.size() == static_cast<std::size_t>(n));  // everyone got the key

        // Hand-traced oracle: depths are the BFS distances on the cycle.
        for (int i = 1; i <= n; ++i) {
            const int j = i - 1;
            CHECK(rep.depth.at(static_cast<NodeId>(i)) == std::min(j, n - j));
        }
        // Exactly one node sees the key twice.
        std::map<NodeId, int> receipts;
        for (const PayloadRecord& p : rep.payloads) receipts[p.to] += 1;
        int twice = 0;
        for (const auto& [id, count] : receipts) {
            CHECK(count <= 2);
            twice += count == 2 ? 1 : 0;
        }
        CHECK(twice == 1);
        CHECK(rep.payload_count() == static_cast<std::uint64_t>(n));  // n-1 deliveries + 1 dup
        CHECK(rep.payload_count() <= 2 * ring.edges.size());
    }
}

TEST_CASE("tree flood has no duplicates and n-1 payloads") {
    const auto kx = make_key_exchange("test-double");
    const auto cipher = make_cipher("xor-siv");
    SplitMix64 rng(99);

    SuperposedGraph tree;
    tree.nodes = {1, 2, 3, 4, 5, 6};
    tree.edges = {EdgeKey(1, 2), EdgeKey(2, 3), EdgeKey(2, 4), EdgeKey(4, 5), EdgeKey(4, 6)};
    std::sort(tree.edges.begin(), tree.edges.end());
    SecureLinkStore store;
    store.establish_for_edges(tree.edges, *kx, rng, 0);
    const SessionKey sk = generate_session_key(rng, 1);

    const DeliveryReport rep = flood_session_key(tree, 4, store, *cipher, sk);
    CHECK(rep.duplicates == 0);
    CHECK(rep.payload_count() == 5);
    CHECK(rep.depth.at(4) == 0);
    CHECK(rep.depth.at(3) == 2);

    // Against the plain BFS oracle.
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (const EdgeKey& e : tree.edges) pairs.emplace_back(e.a, e.b);
    const auto expected = oracle::bfs_depths(tree.nodes, pairs, 4);
    for (const auto& [id, depth] : expected) CHECK(rep.depth.at(id) == depth);
}

TEST_CASE("flood error paths") {
    const auto kx = make_key_exchange("test-double");
    const auto cipher = make_cipher("xor-siv");
    SplitMix64 rng(1);
    auto [ring, store] = keyed_ring(4, rng, *kx);
    const SessionKey sk = generate_session_key(rng, 1);

    CHECK_THROWS_AS(flood_session_key(ring, 99, store, *cipher, sk), LookupError);

    SecureLinkStore partial;
    partial.establish(1, 2, *kx, rng, 0);
    CHECK_THROWS_WITH_AS(flood_session_key(ring, 1, partial, *cipher, sk),
                         doctest::Contains("no link key"), DistributionError);
}

TEST_CASE("flood payloads stay within twice the edge count across rounds") {
    SplitMix64 rng(2025);
    std::vector<NodeState> nodes;
    for (int i = 1; i <= 14; ++i)
        nodes.push_back(node(static_cast<NodeId>(i), rng.next_double(0, 6), rng.next_double(0, 6),
                             3.0));
    DistributedProtocol protocol(nodes, params_for(3.0), 11);
    MetricsReport r = protocol.run_bootstrap();
    for (int round = 0; round < 6; ++round) {
        if (!r.aborted) {
            const auto& st = protocol.state();
            CHECK(r.key_payload <= 2 * st.superposed->edges.size());
            CHECK(st.store.edge_keys() == st.superposed->edges);
            // Each ordered pair forwards at most once.
            std::set<std::pair<NodeId, NodeId>> sends;
            for (const PayloadRecord& p : st.last_delivery->payloads)
                CHECK(sends.emplace(p.from, p.to).second);
        }
        const NodeId mover = static_cast<NodeId>(1 + rng.next_below(14));
        r = protocol.run_round(
            NetworkEvent::move({{mover, Vec2{rng.next_double(0, 6), rng.next_double(0, 6)}}}));
    }
}

TEST_CASE("disconnection aborts and leaves the superposition untouched") {
    DistributedProtocol protocol(unit_path(4), params_for(1.2), 19);
    protocol.run_bootstrap();
    const auto before = protocol.state().superposed->edges;

    const MetricsReport r = protocol.run_round(NetworkEvent::move({{4, Vec2{50, 50}}}));
    CHECK(r.aborted);
    CHECK(r.epoch == 1);
    CHECK(protocol.state().superposed->edges == before);
    CHECK(protocol.state().last_components->size() == 2);

    // Reconnect: pure edge event, but no node event is pending, so the
    // epoch stays.
    const MetricsReport back = protocol.run_round(NetworkEvent::move({{4, Vec2{4, 0}}}));
    CHECK_FALSE(back.aborted);
    CHECK(back.epoch == 1);
}

TEST_CASE("distributed protocol rejects empty membership and double bootstrap") {
    CHECK_THROWS_AS(DistributedProtocol({}, params_for(1.0), 1), ConfigError);
    DistributedProtocol protocol(unit_path(3), params_for(1.2), 1);
    CHECK_THROWS_AS(protocol.run_round(NetworkEvent::power({{1, 1.0}})), Error);
    protocol.run_bootstrap();
    CHECK_THROWS_AS(protocol.run_bootstrap(), Error);
}
