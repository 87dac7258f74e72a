#include "hsk/spanning.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace hsk {

namespace {

// Union-find with path compression and union by size.
class UnionFind {
public:
    explicit UnionFind(const std::vector<NodeId>& ids) {
        for (std::size_t i = 0; i < ids.size(); ++i) index_[ids[i]] = i;
        parent_.resize(ids.size());
        size_.assign(ids.size(), 1);
        for (std::size_t i = 0; i < ids.size(); ++i) parent_[i] = i;
        components_ = ids.size();
    }

    std::size_t find(NodeId id) {
        auto it = index_.find(id);
        if (it == index_.end()) throw LookupError("unknown node id " + std::to_string(id));
        std::size_t i = it->second;
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    bool unite(NodeId a, NodeId b) {
        std::size_t ra = find(a), rb = find(b);
        if (ra == rb) return false;
        if (size_[ra] < size_[rb]) std::swap(ra, rb);
        parent_[rb] = ra;
        size_[ra] += size_[rb];
        components_ -= 1;
        return true;
    }

    std::size_t components() const { return components_; }

private:
    std::map<NodeId, std::size_t> index_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::size_t components_ = 0;
};

std::vector<NodeId> node_ids(const Topology& topo) {
    std::vector<NodeId> ids;
    ids.reserve(topo.node_count());
    for (const NodeState& n : topo.nodes()) ids.push_back(n.id);
    return ids;
}

std::map<NodeId, std::vector<NodeId>> tree_adjacency(const std::vector<NodeId>& nodes,
                                                     const std::vector<EdgeKey>& edges) {
    std::map<NodeId, std::vector<NodeId>> adj;
    for (NodeId id : nodes) adj[id];
    for (const EdgeKey& e : edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    for (auto& [id, nbs] : adj) std::sort(nbs.begin(), nbs.end());
    return adj;
}

std::vector<std::vector<NodeId>> component_partition(const std::vector<NodeId>& nodes,
                                                     const std::vector<EdgeKey>& edges) {
    auto adj = tree_adjacency(nodes, edges);
    std::set<NodeId> seen;
    std::vector<std::vector<NodeId>> blocks;
    for (NodeId start : nodes) {
        if (seen.count(start)) continue;
        std::vector<NodeId> block;
        std::queue<NodeId> q;
        q.push(start);
        seen.insert(start);
        while (!q.empty()) {
            NodeId cur = q.front();
            q.pop();
            block.push_back(cur);
            for (NodeId nb : adj[cur])
                if (seen.insert(nb).second) q.push(nb);
        }
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
    }
    return blocks;
}

SpanningTree finish_tree(std::vector<NodeId> nodes, std::vector<EdgeKey> edges, NodeId root) {
    std::sort(edges.begin(), edges.end());
    SpanningTree tree;
    tree.nodes = std::move(nodes);
    tree.edges = std::move(edges);
    tree.root = root;

    auto adj = tree_adjacency(tree.nodes, tree.edges);
    std::set<NodeId> seen{root};
    std::queue<NodeId> q;
    q.push(root);
    while (!q.empty()) {
        NodeId cur = q.front();
        q.pop();
        for (NodeId nb : adj[cur]) {
            if (seen.insert(nb).second) {
                tree.parent[nb] = cur;
                q.push(nb);
            }
        }
    }
    if (seen.size() != tree.nodes.size())
        throw Error("internal: spanning tree is not connected from its root");
    return tree;
}

}  // namespace

bool lexicographic_tie_rule(const EdgeKey& x, const EdgeKey& y) { return x < y; }

SpanningForest SpanningForest::isolated(std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    return SpanningForest{std::move(nodes), {}};
}

int SpanningTree::depth_of(NodeId id) const {
    int depth = 0;
    NodeId cur = id;
    while (cur != root) {
        auto it = parent.find(cur);
        if (it == parent.end()) throw LookupError("node " + std::to_string(id) + " not in tree");
        cur = it->second;
        depth += 1;
    }
    return depth;
}

int SpanningTree::height() const {
    int h = 0;
    for (NodeId id : nodes) h = std::max(h, depth_of(id));
    return h;
}

std::vector<NodeId> SpanningTree::children_of(NodeId id) const {
    std::vector<NodeId> out;
    for (const auto& [child, par] : parent)
        if (par == id) out.push_back(child);
    return out;  // std::map iteration is already ascending
}

double SpanningTree::total_weight(const WeightedTopology& wtopo) const {
    double sum = 0.0;
    for (const EdgeKey& e : edges) sum += wtopo.weight_of(e);
    return sum;
}

bool SuperposedGraph::has_edge(const EdgeKey& e) const {
    return std::binary_search(edges.begin(), edges.end(), e);
}

SpanningTree extended_kruskal(const WeightedTopology& wtopo, const SpanningForest& preserved,
                              TieRule tie_rule, std::optional<NodeId> root) {
    const Topology& topo = wtopo.topo;
    if (topo.node_count() == 0) throw Error("extended_kruskal: empty topology");
    if (root) topo.node(*root);  // existence check
    std::vector<NodeId> ids = node_ids(topo);

    UnionFind uf(ids);
    std::vector<EdgeKey> tree_edges;

    // Seed the partial trees with the surviving secure links.
    for (const EdgeKey& e : preserved.preserved_edges) {
        if (!topo.has_edge(e.a, e.b))
            throw Error("preserved edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                        ") is stale: not an edge of the current topology");
        if (!uf.unite(e.a, e.b))
            throw Error("preserved forest contains a cycle at (" + std::to_string(e.a) + "," +
                        std::to_string(e.b) + ")");
        tree_edges.push_back(e);
    }

    std::vector<std::size_t> order(topo.edges().size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        if (wtopo.weights[l] != wtopo.weights[r]) return wtopo.weights[l] < wtopo.weights[r];
        return tie_rule(topo.edges()[l], topo.edges()[r]);
    });

    for (std::size_t idx : order) {
        if (uf.components() == 1) break;
        const EdgeKey& e = topo.edges()[idx];
        if (uf.unite(e.a, e.b)) tree_edges.push_back(e);
    }

    if (uf.components() != 1) {
        auto blocks = component_partition(ids, topo.edges());
        throw DisconnectedError("extended_kruskal: topology is disconnected (" +
                                    std::to_string(blocks.size()) + " components)",
                                std::move(blocks));
    }

    return finish_tree(std::move(ids), std::move(tree_edges), root.value_or(ids.front()));
}

SpanningTree kruskal_mst(const WeightedTopology& wtopo, TieRule tie_rule) {
    return extended_kruskal(wtopo, SpanningForest::isolated(node_ids(wtopo.topo)), tie_rule);
}

SpanningTree prim_mst(const WeightedTopology& wtopo, NodeId start) {
    const Topology& topo = wtopo.topo;
    topo.node(start);  // existence check

    std::map<NodeId, std::vector<std::pair<NodeId, double>>> adj;
    for (std::size_t i = 0; i < topo.edges().size(); ++i) {
        const EdgeKey& e = topo.edges()[i];
        const double w = wtopo.weights[i];
        adj[e.a].emplace_back(e.b, w);
        adj[e.b].emplace_back(e.a, w);
    }

    // (weight, canonical edge) keeps the frontier pops deterministic.
    struct Candidate {
        double weight;
        EdgeKey edge;
        NodeId outside;

        bool operator>(const Candidate& o) const {
            if (weight != o.weight) return weight > o.weight;
            return o.edge < edge;
        }
    };
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> frontier;

    std::set<NodeId> inside{start};
    auto push_edges = [&](NodeId id) {
        for (const auto& [nb, w] : adj[id])
            if (!inside.count(nb)) frontier.push({w, EdgeKey(id, nb), nb});
    };
    push_edges(start);

    std::vector<EdgeKey> tree_edges;
    while (!frontier.empty() && inside.size() < topo.node_count()) {
        Candidate c = frontier.top();
        frontier.pop();
        if (inside.count(c.outside)) continue;
        inside.insert(c.outside);
        tree_edges.push_back(c.edge);
        push_edges(c.outside);
    }

    if (inside.size() != topo.node_count()) {
        auto blocks = component_partition(node_ids(topo), topo.edges());
        throw DisconnectedError("prim_mst: topology is disconnected (" +
                                    std::to_string(blocks.size()) + " components)",
                                std::move(blocks));
    }
    return finish_tree(node_ids(topo), std::move(tree_edges), start);
}

namespace {

SpanningForest filtered_forest(std::span<const EdgeKey> prev, const Topology& new_topo,
                               const std::function<bool(const EdgeKey&, const EdgeKey&)>& before) {
    std::vector<EdgeKey> alive;
    for (const EdgeKey& e : prev) {
        // Departed endpoint or broken distance rule: the link is gone.
        if (new_topo.contains(e.a) && new_topo.contains(e.b) && new_topo.has_edge(e.a, e.b))
            alive.push_back(e);
    }
    std::sort(alive.begin(), alive.end(), before);
    alive.erase(std::unique(alive.begin(), alive.end()), alive.end());

    UnionFind uf(
        [&] {
            std::vector<NodeId> ids;
            for (const NodeState& n : new_topo.nodes()) ids.push_back(n.id);
            return ids;
        }());
    std::vector<EdgeKey> kept;
    for (const EdgeKey& e : alive)
        if (uf.unite(e.a, e.b)) kept.push_back(e);
    std::sort(kept.begin(), kept.end());

    std::vector<NodeId> ids;
    for (const NodeState& n : new_topo.nodes()) ids.push_back(n.id);
    return SpanningForest{std::move(ids), std::move(kept)};
}

}  // namespace

SpanningForest derive_preserved_forest(std::span<const EdgeKey> prev_secure_links,
                                       const Topology& new_topo) {
    return filtered_forest(prev_secure_links, new_topo,
                           [](const EdgeKey& l, const EdgeKey& r) { return l < r; });
}

SpanningForest derive_preserved_forest(std::span<const EdgeKey> prev_secure_links,
                                       const WeightedTopology& new_wtopo, TieRule tie_rule) {
    return filtered_forest(prev_secure_links, new_wtopo.topo,
                           [&](const EdgeKey& l, const EdgeKey& r) {
                               const double wl = new_wtopo.weight_of(l);
                               const double wr = new_wtopo.weight_of(r);
                               if (wl != wr) return wl < wr;
                               return tie_rule(l, r);
                           });
}

SpanningTree build_lst(const WeightedTopology& sub, const SpanningForest& preserved_in_sub,
                       NodeId local_leader, TieRule tie_rule) {
    return extended_kruskal(sub, preserved_in_sub, tie_rule, local_leader);
}

SuperposedGraph superpose(const std::vector<SpanningTree>& lsts) {
    std::set<NodeId> nodes;
    std::set<EdgeKey> edges;
    for (const SpanningTree& lst : lsts) {
        nodes.insert(lst.nodes.begin(), lst.nodes.end());
        edges.insert(lst.edges.begin(), lst.edges.end());
    }
    SuperposedGraph g;
    g.nodes.assign(nodes.begin(), nodes.end());
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

std::size_t redundant_edge_count(const SuperposedGraph& g) {
    if (g.nodes.empty()) throw Error("redundant_edge_count: empty graph");
    auto blocks = component_partition(g.nodes, g.edges);
    if (blocks.size() != 1)
        throw DisconnectedError("redundant_edge_count: graph is disconnected", std::move(blocks));
    return g.edges.size() - (g.nodes.size() - 1);
}

}  // namespace hsk
