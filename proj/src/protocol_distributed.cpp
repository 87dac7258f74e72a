#include "hsk/protocol_distributed.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace hsk {

NodeId select_initiator(const std::vector<NodeId>& members, std::uint64_t seed) {
    if (members.empty()) throw Error("select_initiator: no members");
    std::vector<NodeId> sorted = members;
    std::sort(sorted.begin(), sorted.end());
    SplitMix64 rng(seed);
    return sorted[rng.next_below(sorted.size())];
}

DeliveryReport flood_session_key(const SuperposedGraph& g, NodeId initiator,
                                 const SecureLinkStore& store, const SymmetricCipher& cipher,
                                 const SessionKey& sk) {
    if (!std::binary_search(g.nodes.begin(), g.nodes.end(), initiator))
        throw LookupError("flood initiator " + std::to_string(initiator) + " not in graph");

    std::map<NodeId, std::vector<NodeId>> adj;
    for (NodeId id : g.nodes) adj[id];
    for (const EdgeKey& e : g.edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    for (auto& [id, nbs] : adj) std::sort(nbs.begin(), nbs.end());

    DeliveryReport rep;
    rep.depth[initiator] = 0;

    struct Send {
        NodeId from, to;
        int depth;
        std::size_t record;
    };
    std::deque<Send> queue;

    auto send = [&](NodeId from, NodeId to, int depth) {
        const EdgeKey e(from, to);
        if (!store.has(e))
            throw DistributionError("no link key for edge (" + std::to_string(e.a) + "," +
                                    std::to_string(e.b) + ")");
        const Bytes ct = wrap_session_key(sk, store.record(e).key, cipher);
        rep.payloads.push_back(PayloadRecord{from, to, depth, ct, false});
        queue.push_back(Send{from, to, depth, rep.payloads.size() - 1});
    };

    for (NodeId nb : adj[initiator]) send(initiator, nb, 1);

    // FIFO gives breadth order. A node forwards once, on first receipt, to
    // every neighbor that has not received the key yet; payloads already in
    // flight toward a node when it first receives are the duplicates.
    while (!queue.empty()) {
        const Send s = queue.front();
        queue.pop_front();
        if (rep.depth.count(s.to)) {
            rep.payloads[s.record].duplicate = true;
            rep.duplicates += 1;
            continue;
        }
        const auto received =
            unwrap_session_key(rep.payloads[s.record].ciphertext, store.record(EdgeKey(s.from, s.to)).key, cipher);
        if (!received || !(*received == sk))
            throw Error("internal: flood payload failed to unwrap on an established link");
        rep.depth[s.to] = s.depth;
        rep.max_depth = std::max(rep.max_depth, s.depth);
        for (NodeId nb : adj[s.to]) {
            if (nb == s.from || rep.depth.count(nb)) continue;
            send(s.to, nb, s.depth + 1);
        }
    }
    return rep;
}

DistributedProtocol::DistributedProtocol(std::vector<NodeState> initial_nodes,
                                         WeightParams weights, std::uint64_t seed,
                                         ProtocolOptions options)
    : weight_params_(weights),
      options_(std::move(options)),
      kx_(make_key_exchange(options_.key_exchange)),
      cipher_(make_cipher(options_.cipher)),
      kx_rng_(derive_seed(seed, Stream::key_exchange)),
      session_rng_(derive_seed(seed, Stream::session_keys)),
      initiator_rng_(derive_seed(seed, Stream::initiator)),
      pending_initial_(std::move(initial_nodes)) {
    if (pending_initial_.empty())
        throw ConfigError("distributed protocol needs an initial membership");
}

MetricsReport DistributedProtocol::run_bootstrap() {
    if (state_.round >= 0) throw Error("bootstrap already executed");
    Topology topo = build_topology(pending_initial_, NetMode::homogeneous, 0);
    pending_initial_.clear();
    return execute_round(topo, EventKind::node_join, "bootstrap");
}

MetricsReport DistributedProtocol::run_round(const NetworkEvent& ev) {
    if (state_.round < 0) throw Error("run_bootstrap must execute first");
    Topology next = apply_event(state_.topo, ev);
    return execute_round(next, ev.kind, to_string(ev.kind));
}

MetricsReport DistributedProtocol::execute_round(const Topology& next_topo, EventKind kind,
                                                 const std::string& kind_label) {
    state_.log.begin_round();
    if (is_node_event(kind)) rekey_pending_ = true;

    const std::size_t n = next_topo.node_count();
    MessageCounters counters;
    counters.hello = n;       // Step 1: every local leader broadcasts
    counters.weight_msg = n;  // Step 2: every local leader broadcasts

    MetricsReport report;
    report.round = next_topo.round_index();
    report.event_kind = kind_label;

    const auto components = connected_components(next_topo);
    if (components.size() > 1) {
        state_.topo = next_topo;
        state_.round = next_topo.round_index();
        state_.last_components = components;
        state_.log.add(counters);
        report.hello = counters.hello;
        report.weight_msg = counters.weight_msg;
        report.epoch = state_.session ? state_.session->epoch : 0;
        report.aborted = true;
        return report;
    }

    if (n == 0) {  // everyone left
        state_.topo = next_topo;
        state_.round = next_topo.round_index();
        state_.lsts.clear();
        neighborhood_sigs_.clear();
        state_.superposed = SuperposedGraph{};
        state_.store.prune({}, {});
        state_.session.reset();
        state_.last_components.reset();
        state_.log.add(counters);
        report.hello = 0;
        report.weight_msg = 0;
        return report;
    }

    // Secure links still physically alive; each rebuilt LST sees the slice
    // inside its own neighborhood.
    std::vector<EdgeKey> surviving;
    for (const EdgeKey& e : state_.store.edge_keys())
        if (next_topo.contains(e.a) && next_topo.contains(e.b) && next_topo.has_edge(e.a, e.b))
            surviving.push_back(e);

    // Step 3: rebuild only the LSTs whose neighborhood subgraph changed.
    std::uint64_t rebuilds = 0;
    std::map<NodeId, SpanningTree> lsts;
    std::map<NodeId, NeighborhoodSig> sigs;
    for (const NodeState& node : next_topo.nodes()) {
        const Topology sub = neighborhood_subgraph(next_topo, node.id);
        NeighborhoodSig sig{sub.nodes()};
        auto prev_sig = neighborhood_sigs_.find(node.id);
        if (prev_sig != neighborhood_sigs_.end() && prev_sig->second == sig &&
            state_.lsts.count(node.id)) {
            lsts[node.id] = state_.lsts.at(node.id);
            sigs[node.id] = std::move(sig);
            continue;
        }
        const WeightedTopology sub_w = recompute_weights(sub, weight_params_);
        std::vector<EdgeKey> candidates;
        for (const EdgeKey& e : surviving)
            if (sub.has_edge(e.a, e.b)) candidates.push_back(e);
        const SpanningForest preserved_in_sub = derive_preserved_forest(candidates, sub_w);
        lsts[node.id] = build_lst(sub_w, preserved_in_sub, node.id);
        sigs[node.id] = std::move(sig);
        rebuilds += 1;
    }

    std::vector<SpanningTree> lst_list;
    lst_list.reserve(lsts.size());
    for (const auto& [id, lst] : lsts) lst_list.push_back(lst);
    SuperposedGraph superposed = superpose(lst_list);
    const std::size_t redundant = redundant_edge_count(superposed);  // connected per Theorem 1

    // Step 4: each local leader notifies its own LST neighbors; shared
    // edges then need a single exchange because the store is keyed by the
    // unordered pair.
    for (const auto& [id, lst] : lsts) {
        std::uint64_t degree = 0;
        for (const EdgeKey& e : lst.edges)
            if (e.a == id || e.b == id) degree += 1;
        counters.notification += degree;
    }

    std::set<NodeId> departed;
    for (const NodeState& prev_node : state_.topo.nodes())
        if (!next_topo.contains(prev_node.id)) departed.insert(prev_node.id);
    state_.store.prune(departed, superposed.edges);
    const StoreDelta delta =
        state_.store.establish_for_edges(superposed.edges, *kx_, kx_rng_, next_topo.round_index());

    // Step 5: seeded initiator floods a fresh key over the superposition.
    const bool do_rekey = rekey_pending_ || options_.rekey_on_edge_events;
    if (do_rekey) {
        const NodeId initiator = select_initiator(superposed.nodes, initiator_rng_.next());
        const int epoch = (state_.session ? state_.session->epoch : 0) + 1;
        const SessionKey sk = generate_session_key(session_rng_, epoch, options_.session_key_len);
        DeliveryReport delivery = flood_session_key(superposed, initiator, state_.store, *cipher_, sk);
        counters.key_payload = delivery.payload_count();
        report.max_depth = delivery.max_depth;
        report.duplicates = delivery.duplicates;
        state_.session = sk;
        state_.last_delivery = std::move(delivery);
        state_.last_initiator = initiator;
        rekey_pending_ = false;
    }

    state_.topo = next_topo;
    state_.lsts = std::move(lsts);
    state_.superposed = std::move(superposed);
    state_.round = next_topo.round_index();
    state_.last_components.reset();
    state_.lst_rebuilds = rebuilds;
    neighborhood_sigs_ = std::move(sigs);
    state_.log.add(counters);

    report.epoch = state_.session ? state_.session->epoch : 0;
    report.hello = counters.hello;
    report.weight_msg = counters.weight_msg;
    report.notification = counters.notification;
    report.key_payload = counters.key_payload;
    report.new_exchanges = delta.new_exchanges;
    report.reused_links = delta.reused_links;
    report.redundant_edges = redundant;
    return report;
}

}  // namespace hsk
