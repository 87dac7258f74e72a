#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hsk/types.hpp"

namespace hsk {

enum class NetMode { unbalanced, homogeneous };

constexpr NodeId kLeaderId = 1;  // fixed leader in unbalanced mode

struct NodeState {
    NodeId id = 0;
    Vec2 position;
    double power_available = 0.0;   // PA_i
    double transmission_range = 0.0;

    friend bool operator==(const NodeState&, const NodeState&) = default;
};

// Immutable snapshot of the network after the k-th node event. Edges are
// derived from geometry, never stored independently:
//   homogeneous:  (i,j) is an edge iff d_ij <= d_max (boundary ties admitted)
//   unbalanced:   (i,j) is an edge iff both directions satisfy the strict
//                 d < range rule; the leader's coverage of every normal node
//                 is a validated assumption, not an edge by itself.
class Topology {
public:
    Topology() = default;

    NetMode mode() const { return mode_; }
    int round_index() const { return round_index_; }
    const std::vector<NodeState>& nodes() const { return nodes_; }       // sorted by id
    const std::vector<EdgeKey>& edges() const { return edges_; }         // sorted
    std::size_t node_count() const { return nodes_.size(); }

    bool contains(NodeId id) const;
    const NodeState& node(NodeId id) const;  // throws LookupError
    bool has_edge(NodeId a, NodeId b) const;

private:
    friend Topology build_topology(std::vector<NodeState> nodes, NetMode mode, int round_index);

    NetMode mode_ = NetMode::homogeneous;
    int round_index_ = 0;
    std::vector<NodeState> nodes_;
    std::vector<EdgeKey> edges_;
};

enum class EventKind { node_join, node_leave, position_update, power_update };

std::string to_string(EventKind kind);
bool is_node_event(EventKind kind);

// One event may affect a batch of nodes; only the payload matching `kind`
// is consulted.
struct NetworkEvent {
    EventKind kind = EventKind::node_join;
    std::vector<NodeState> joins;
    std::vector<NodeId> leaves;
    std::vector<std::pair<NodeId, Vec2>> moves;
    std::vector<std::pair<NodeId, double>> power_updates;

    static NetworkEvent join(std::vector<NodeState> nodes);
    static NetworkEvent leave(std::vector<NodeId> ids);
    static NetworkEvent move(std::vector<std::pair<NodeId, Vec2>> updates);
    static NetworkEvent power(std::vector<std::pair<NodeId, double>> updates);
};

Topology build_topology(std::vector<NodeState> nodes, NetMode mode, int round_index = 0);

// New snapshot with the event applied. Node events advance round_index,
// position/power updates do not.
Topology apply_event(const Topology& topo, const NetworkEvent& ev);

// Def. 1: a can transmit to b, d_ab < D_a (strict). In unbalanced mode the
// leader reaches every normal node by assumption.
bool directly_connected(const Topology& topo, NodeId a, NodeId b);

bool is_connected(const Topology& topo);

// Blocks sorted by smallest member id; each block sorted.
std::vector<std::vector<NodeId>> connected_components(const Topology& topo);

// Induced subgraph on {j : d_ij <= d_max} (includes i). Homogeneous only.
Topology neighborhood_subgraph(const Topology& topo, NodeId i);

}  // namespace hsk
