#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hsk/weighting.hpp"

namespace hsk {

// Orders edges of equal weight. The default is lexicographic on
// (min endpoint, max endpoint), which makes every construction in this
// module reproducible.
using TieRule = bool (*)(const EdgeKey&, const EdgeKey&);

bool lexicographic_tie_rule(const EdgeKey& x, const EdgeKey& y);

// Surviving secure links G_k^-: always acyclic, possibly disconnected.
struct SpanningForest {
    std::vector<NodeId> nodes;        // sorted
    std::vector<EdgeKey> preserved_edges;  // sorted

    static SpanningForest isolated(std::vector<NodeId> nodes);  // G_0^-
};

struct SpanningTree {
    std::vector<NodeId> nodes;   // sorted
    std::vector<EdgeKey> edges;  // sorted, |edges| == |nodes| - 1
    NodeId root = 0;
    std::map<NodeId, NodeId> parent;  // root absent

    int depth_of(NodeId id) const;             // root = 0
    int height() const;                        // max depth
    std::vector<NodeId> children_of(NodeId id) const;  // ascending
    double total_weight(const WeightedTopology& wtopo) const;
};

// Edge union of per-node LSTs.
struct SuperposedGraph {
    std::vector<NodeId> nodes;   // sorted
    std::vector<EdgeKey> edges;  // sorted

    bool has_edge(const EdgeKey& e) const;
};

// Kruskal's greedy merge seeded with the preserved partial trees instead of
// isolated nodes. Every preserved edge survives into the result; each added
// edge is a minimum-weight edge joining two partial trees at the moment of
// selection. With an empty forest this is plain Kruskal, so the k=0 result
// is a true MST.
//
// Throws DisconnectedError (with the component partition) when the weighted
// topology cannot be spanned, and Error when the preserved forest is stale
// or cyclic. Root defaults to the smallest node id.
SpanningTree extended_kruskal(const WeightedTopology& wtopo, const SpanningForest& preserved,
                              TieRule tie_rule = lexicographic_tie_rule,
                              std::optional<NodeId> root = std::nullopt);

SpanningTree kruskal_mst(const WeightedTopology& wtopo,
                         TieRule tie_rule = lexicographic_tie_rule);

SpanningTree prim_mst(const WeightedTopology& wtopo, NodeId start);

// Secure links that survive into the new round: both endpoints still
// present and the edge still realizable in new_topo. Tree inputs stay
// acyclic by construction. The weighted overload accepts edge sets with
// cycles (the distributed case) and keeps a maximal acyclic subset,
// greedily by ascending current weight under the tie rule.
SpanningForest derive_preserved_forest(std::span<const EdgeKey> prev_secure_links,
                                       const Topology& new_topo);
SpanningForest derive_preserved_forest(std::span<const EdgeKey> prev_secure_links,
                                       const WeightedTopology& new_wtopo,
                                       TieRule tie_rule = lexicographic_tie_rule);

// LST of one neighborhood subgraph, rooted at the local leader.
SpanningTree build_lst(const WeightedTopology& sub, const SpanningForest& preserved_in_sub,
                       NodeId local_leader, TieRule tie_rule = lexicographic_tie_rule);

SuperposedGraph superpose(const std::vector<SpanningTree>& lsts);

// |E| - (|V| - 1) for a connected superposed graph.
std::size_t redundant_edge_count(const SuperposedGraph& g);

}  // namespace hsk
