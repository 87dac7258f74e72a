#include "hsk/protocol_centralized.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace hsk {

DeliveryReport distribute_session_key(const SpanningTree& tree, const SecureLinkStore& store,
                                      const SymmetricCipher& cipher, const SessionKey& sk) {
    DeliveryReport rep;
    rep.depth[tree.root] = 0;

    std::queue<NodeId> frontier;
    frontier.push(tree.root);
    while (!frontier.empty()) {
        const NodeId cur = frontier.front();
        frontier.pop();
        const int next_depth = rep.depth.at(cur) + 1;
        for (NodeId child : tree.children_of(cur)) {
            const EdgeKey e(cur, child);
            if (!store.has(e))
                throw DistributionError("no link key for tree edge (" + std::to_string(e.a) +
                                        "," + std::to_string(e.b) + ")");
            const Bytes& link_key = store.record(e).key;
            const Bytes ct = wrap_session_key(sk, link_key, cipher);
            const auto received = unwrap_session_key(ct, link_key, cipher);
            if (!received || !(*received == sk))
                throw Error("internal: session key round-trip failed on an established link");
            rep.payloads.push_back(PayloadRecord{cur, child, next_depth, ct, false});
            rep.depth[child] = next_depth;
            rep.max_depth = std::max(rep.max_depth, next_depth);
            frontier.push(child);
        }
    }
    return rep;
}

CentralizedProtocol::CentralizedProtocol(std::vector<NodeState> initial_nodes,
                                         WeightParams weights, std::uint64_t seed,
                                         ProtocolOptions options)
    : weight_params_(weights),
      options_(std::move(options)),
      kx_(make_key_exchange(options_.key_exchange)),
      cipher_(make_cipher(options_.cipher)),
      kx_rng_(derive_seed(seed, Stream::key_exchange)),
      session_rng_(derive_seed(seed, Stream::session_keys)),
      pending_initial_(std::move(initial_nodes)) {
    if (pending_initial_.empty())
        throw ConfigError("centralized protocol needs an initial membership");
}

MetricsReport CentralizedProtocol::run_bootstrap() {
    if (state_.round >= 0) throw Error("bootstrap already executed");
    Topology topo = build_topology(pending_initial_, NetMode::unbalanced, 0);
    pending_initial_.clear();
    return execute_round(topo, EventKind::node_join, "bootstrap");
}

MetricsReport CentralizedProtocol::run_round(const NetworkEvent& ev) {
    if (state_.round < 0) throw Error("run_bootstrap must execute first");
    Topology next = apply_event(state_.topo, ev);
    return execute_round(next, ev.kind, to_string(ev.kind));
}

Topology CentralizedProtocol::run_topology_construction() {
    if (state_.round < 0) throw Error("run_bootstrap must execute first");
    const std::size_t n = state_.topo.node_count();
    MessageCounters counters;
    counters.hello = n;
    counters.id_msg = n > 0 ? n - 1 : 0;
    state_.log.add(counters);
    // The messages are physical even when nothing changed; the rebuilt view
    // equals the snapshot because edges are derived from geometry.
    return build_topology(state_.topo.nodes(), NetMode::unbalanced, state_.topo.round_index());
}

MetricsReport CentralizedProtocol::execute_round(const Topology& next_topo, EventKind kind,
                                                 const std::string& kind_label) {
    state_.log.begin_round();
    if (is_node_event(kind)) rekey_pending_ = true;

    const std::size_t n = next_topo.node_count();
    MessageCounters counters;
    counters.hello = n;                 // Hello broadcast, every node
    counters.id_msg = n > 0 ? n - 1 : 0;  // ID report from every normal node

    MetricsReport report;
    report.round = next_topo.round_index();
    report.event_kind = kind_label;

    const auto components = connected_components(next_topo);
    if (components.size() > 1) {
        // The leader cannot span what the radios cannot reach: record the
        // partition, keep tree/store/session from the last good round.
        state_.topo = next_topo;
        state_.round = next_topo.round_index();
        state_.last_components = components;
        state_.log.add(counters);
        report.hello = counters.hello;
        report.id_msg = counters.id_msg;
        report.epoch = state_.session ? state_.session->epoch : 0;
        report.aborted = true;
        return report;
    }

    // Step 1: topology + surviving secure links G_k^-.
    const std::vector<EdgeKey> prev_links =
        state_.tree ? state_.tree->edges : std::vector<EdgeKey>{};
    const SpanningForest preserved = derive_preserved_forest(prev_links, next_topo);

    // Step 2: weight refresh.
    counters.weight_msg = n > 0 ? n - 1 : 0;
    const WeightedTopology wtopo = recompute_weights(next_topo, weight_params_);

    // Steps 3-4: when G_k^- already spans, the merge returns it untouched
    // and Step 5 is skipped entirely; otherwise the extended Kruskal merge
    // repairs it and the leader notifies the affected normal nodes.
    const bool forest_spans = n > 0 && preserved.preserved_edges.size() == n - 1;
    SpanningTree tree = extended_kruskal(wtopo, preserved, lexicographic_tie_rule, kLeaderId);
    if (!forest_spans) {
        // One notification per normal node with tree neighbors.
        std::set<NodeId> notified;
        for (const EdgeKey& e : tree.edges) {
            if (e.a != kLeaderId) notified.insert(e.a);
            if (e.b != kLeaderId) notified.insert(e.b);
        }
        counters.notification = notified.size();
    }

    // Departed members lose their link keys before any new payload exists.
    std::set<NodeId> departed;
    for (const NodeState& prev_node : state_.topo.nodes())
        if (!next_topo.contains(prev_node.id)) departed.insert(prev_node.id);
    state_.store.prune(departed, tree.edges);
    const StoreDelta delta =
        state_.store.establish_for_edges(tree.edges, *kx_, kx_rng_, next_topo.round_index());

    // Step 6: fresh session key when a node event is pending (or forced).
    const bool do_rekey = rekey_pending_ || options_.rekey_on_edge_events;
    if (do_rekey) {
        const int epoch = (state_.session ? state_.session->epoch : 0) + 1;
        const SessionKey sk = generate_session_key(session_rng_, epoch, options_.session_key_len);
        DeliveryReport delivery = distribute_session_key(tree, state_.store, *cipher_, sk);
        counters.key_payload = delivery.payload_count();
        report.max_depth = delivery.max_depth;
        state_.session = sk;
        state_.last_delivery = std::move(delivery);
        rekey_pending_ = false;
    }

    state_.topo = next_topo;
    state_.tree = std::move(tree);
    state_.preserved_edges = preserved.preserved_edges;
    state_.round = next_topo.round_index();
    state_.last_components.reset();
    state_.log.add(counters);

    report.epoch = state_.session ? state_.session->epoch : 0;
    report.hello = counters.hello;
    report.id_msg = counters.id_msg;
    report.weight_msg = counters.weight_msg;
    report.notification = counters.notification;
    report.key_payload = counters.key_payload;
    report.new_exchanges = delta.new_exchanges;
    report.reused_links = delta.reused_links;
    return report;
}

}  // namespace hsk
