#include "hsk/net_model.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace hsk {

namespace {

const NodeState* find_node(const std::vector<NodeState>& nodes, NodeId id) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const NodeState& n, NodeId v) { return n.id < v; });
    if (it == nodes.end() || it->id != id) return nullptr;
    return &*it;
}

// Adjacency over the derived edge set, ids ascending.
std::map<NodeId, std::vector<NodeId>> adjacency(const Topology& topo) {
    std::map<NodeId, std::vector<NodeId>> adj;
    for (const NodeState& n : topo.nodes()) adj[n.id];
    for (const EdgeKey& e : topo.edges()) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    return adj;
}

}  // namespace

bool Topology::contains(NodeId id) const { return find_node(nodes_, id) != nullptr; }

const NodeState& Topology::node(NodeId id) const {
    const NodeState* n = find_node(nodes_, id);
    if (n == nullptr) throw LookupError("unknown node id " + std::to_string(id));
    return *n;
}

bool Topology::has_edge(NodeId a, NodeId b) const {
    return std::binary_search(edges_.begin(), edges_.end(), EdgeKey(a, b));
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::node_join: return "join";
        case EventKind::node_leave: return "leave";
        case EventKind::position_update: return "move";
        case EventKind::power_update: return "power";
    }
    return "?";
}

bool is_node_event(EventKind kind) {
    return kind == EventKind::node_join || kind == EventKind::node_leave;
}

NetworkEvent NetworkEvent::join(std::vector<NodeState> nodes) {
    NetworkEvent ev;
    ev.kind = EventKind::node_join;
    ev.joins = std::move(nodes);
    return ev;
}

NetworkEvent NetworkEvent::leave(std::vector<NodeId> ids) {
    NetworkEvent ev;
    ev.kind = EventKind::node_leave;
    ev.leaves = std::move(ids);
    return ev;
}

NetworkEvent NetworkEvent::move(std::vector<std::pair<NodeId, Vec2>> updates) {
    NetworkEvent ev;
    ev.kind = EventKind::position_update;
    ev.moves = std::move(updates);
    return ev;
}

NetworkEvent NetworkEvent::power(std::vector<std::pair<NodeId, double>> updates) {
    NetworkEvent ev;
    ev.kind = EventKind::power_update;
    ev.power_updates = std::move(updates);
    return ev;
}

Topology build_topology(std::vector<NodeState> nodes, NetMode mode, int round_index) {
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeState& l, const NodeState& r) { return l.id < r.id; });
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i].id == nodes[i + 1].id)
            throw LookupError("duplicate node id " + std::to_string(nodes[i].id));
    }
    for (const NodeState& n : nodes) {
        if (n.id == 0) throw LookupError("node ids must be positive");
        if (n.transmission_range <= 0.0)
            throw ConfigError("node " + std::to_string(n.id) + ": transmission_range must be > 0");
        if (n.power_available < 0.0)
            throw ConfigError("node " + std::to_string(n.id) + ": power_available must be >= 0");
    }

    if (mode == NetMode::unbalanced) {
        const NodeState* leader = find_node(nodes, kLeaderId);
        if (leader == nullptr && !nodes.empty())
            throw ConfigError("unbalanced mode requires a leader with id 1");
        if (leader != nullptr) {
            for (const NodeState& n : nodes) {
                if (n.id == kLeaderId) continue;
                if (distance(leader->position, n.position) > leader->transmission_range)
                    throw ConfigError("assumption A1 violated: node " + std::to_string(n.id) +
                                      " is outside the leader range");
            }
        }
    }

    Topology topo;
    topo.mode_ = mode;
    topo.round_index_ = round_index;
    topo.nodes_ = std::move(nodes);

    for (std::size_t i = 0; i < topo.nodes_.size(); ++i) {
        for (std::size_t j = i + 1; j < topo.nodes_.size(); ++j) {
            const NodeState& u = topo.nodes_[i];
            const NodeState& v = topo.nodes_[j];
            const double d = distance(u.position, v.position);
            bool edge = false;
            if (mode == NetMode::homogeneous) {
                edge = d <= std::min(u.transmission_range, v.transmission_range);
            } else {
                // Mutual reachability under the strict rule; the leader side
                // always holds by A1, so the normal node's range decides.
                const bool u_reaches = (u.id == kLeaderId) ? true : d < u.transmission_range;
                const bool v_reaches = (v.id == kLeaderId) ? true : d < v.transmission_range;
                edge = u_reaches && v_reaches;
            }
            if (edge) topo.edges_.emplace_back(u.id, v.id);
        }
    }
    std::sort(topo.edges_.begin(), topo.edges_.end());
    return topo;
}

Topology apply_event(const Topology& topo, const NetworkEvent& ev) {
    std::vector<NodeState> nodes = topo.nodes();
    int round = topo.round_index();

    switch (ev.kind) {
        case EventKind::node_join: {
            for (const NodeState& n : ev.joins) {
                if (topo.contains(n.id))
                    throw LookupError("join of duplicate id " + std::to_string(n.id));
                nodes.push_back(n);
            }
            round += 1;
            break;
        }
        case EventKind::node_leave: {
            std::set<NodeId> departing(ev.leaves.begin(), ev.leaves.end());
            for (NodeId id : departing) {
                if (!topo.contains(id))
                    throw LookupError("leave of unknown node " + std::to_string(id));
                if (topo.mode() == NetMode::unbalanced && id == kLeaderId)
                    throw ConfigError("the leader cannot leave an unbalanced network");
            }
            std::erase_if(nodes, [&](const NodeState& n) { return departing.count(n.id) > 0; });
            round += 1;
            break;
        }
        case EventKind::position_update: {
            for (const auto& [id, pos] : ev.moves) {
                auto it = std::find_if(nodes.begin(), nodes.end(),
                                       [&](const NodeState& n) { return n.id == id; });
                if (it == nodes.end())
                    throw LookupError("position update for unknown node " + std::to_string(id));
                it->position = pos;
            }
            break;
        }
        case EventKind::power_update: {
            for (const auto& [id, pa] : ev.power_updates) {
                auto it = std::find_if(nodes.begin(), nodes.end(),
                                       [&](const NodeState& n) { return n.id == id; });
                if (it == nodes.end())
                    throw LookupError("power update for unknown node " + std::to_string(id));
                it->power_available = pa;
            }
            break;
        }
    }
    return build_topology(std::move(nodes), topo.mode(), round);
}

bool directly_connected(const Topology& topo, NodeId a, NodeId b) {
    if (a == b) throw LookupError("directly_connected: a and b must differ");
    const NodeState& na = topo.node(a);
    const NodeState& nb = topo.node(b);
    if (topo.mode() == NetMode::unbalanced && a == kLeaderId) return true;  // A1
    return distance(na.position, nb.position) < na.transmission_range;
}

std::vector<std::vector<NodeId>> connected_components(const Topology& topo) {
    auto adj = adjacency(topo);
    std::set<NodeId> seen;
    std::vector<std::vector<NodeId>> components;
    for (const NodeState& start : topo.nodes()) {
        if (seen.count(start.id)) continue;
        std::vector<NodeId> block;
        std::queue<NodeId> frontier;
        frontier.push(start.id);
        seen.insert(start.id);
        while (!frontier.empty()) {
            NodeId cur = frontier.front();
            frontier.pop();
            block.push_back(cur);
            for (NodeId nb : adj[cur]) {
                if (seen.insert(nb).second) frontier.push(nb);
            }
        }
        std::sort(block.begin(), block.end());
        components.push_back(std::move(block));
    }
    return components;
}

bool is_connected(const Topology& topo) { return connected_components(topo).size() <= 1; }

Topology neighborhood_subgraph(const Topology& topo, NodeId i) {
    if (topo.mode() != NetMode::homogeneous)
        throw ConfigError("neighborhood_subgraph is defined for homogeneous topologies");
    const NodeState& center = topo.node(i);
    std::vector<NodeState> members;
    for (const NodeState& n : topo.nodes()) {
        if (n.id == i || distance(center.position, n.position) <= center.transmission_range)
            members.push_back(n);
    }
    return build_topology(std::move(members), NetMode::homogeneous, topo.round_index());
}

}  // namespace hsk
