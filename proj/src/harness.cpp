#include "hsk/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <queue>
#include <sstream>

#include "hsk/protocol_centralized.hpp"
#include "hsk/protocol_distributed.hpp"
#include "hsk/rng.hpp"

namespace hsk {

namespace {

// Shortest round-trip formatting keeps file output byte-stable.
std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error("failed to format a double");
    return std::string(buf, ptr);
}

}  // namespace

std::vector<NodeState> random_placement(std::uint64_t seed, int n, double area_w, double area_h,
                                        double pa_min, double pa_max) {
    if (n < 1) throw ConfigError("random_placement: n must be >= 1");
    SplitMix64 rng(derive_seed(seed, Stream::placement));
    std::vector<NodeState> nodes;
    nodes.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        NodeState node;
        node.id = static_cast<NodeId>(i);
        node.position.x = rng.next_double(0.0, area_w);
        node.position.y = rng.next_double(0.0, area_h);
        node.power_available = rng.next_double(pa_min, pa_max);
        nodes.push_back(node);
    }
    return nodes;
}

ConnectivityBounds compute_connectivity_bounds(std::span<const NodeState> nodes) {
    const std::size_t n = nodes.size();
    if (n < 2) throw Error("compute_connectivity_bounds: need at least 2 nodes");

    ConnectivityBounds bounds;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            bounds.d_upper =
                std::max(bounds.d_upper, distance(nodes[i].position, nodes[j].position));

    // Prim over the complete Euclidean graph; the bottleneck edge of the
    // MST is the smallest range that keeps the placement connected.
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<bool> inside(n, false);
    best[0] = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t u = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!inside[i] && (u == n || best[i] < best[u])) u = i;
        inside[u] = true;
        bounds.d_low = std::max(bounds.d_low, best[u]);
        for (std::size_t v = 0; v < n; ++v) {
            if (inside[v]) continue;
            best[v] = std::min(best[v], distance(nodes[u].position, nodes[v].position));
        }
    }
    return bounds;
}

namespace {

// Resolves the schedule's random placeholders and feeds either protocol.
class ScenarioRunner {
public:
    explicit ScenarioRunner(const Scenario& sc)
        : sc_(sc), events_rng_(derive_seed(sc.seed, Stream::events)) {
        validate_scenario(sc_);
        std::vector<NodeState> nodes = random_placement(sc_.seed, sc_.node_count, sc_.area_w,
                                                        sc_.area_h, sc_.pa_min, sc_.pa_max);
        for (NodeState& node : nodes) node.transmission_range = range_for(node.id);
        next_id_ = static_cast<NodeId>(sc_.node_count + 1);

        ProtocolOptions options;
        options.key_exchange = sc_.primitive;
        options.session_key_len = sc_.session_key_bytes;
        options.rekey_on_edge_events = sc_.rekey_on_edge_events;
        if (sc_.mode == ProtocolMode::centralized)
            centralized_.emplace(std::move(nodes), sc_.weight_params(), sc_.seed, options);
        else
            distributed_.emplace(std::move(nodes), sc_.weight_params(), sc_.seed, options);
    }

    RunResult run() {
        RunResult result;
        result.reports.push_back(centralized_ ? centralized_->run_bootstrap()
                                              : distributed_->run_bootstrap());
        for (const ScheduledEvent& sev : sc_.schedule) {
            const NetworkEvent ev = resolve(sev);
            result.reports.push_back(centralized_ ? centralized_->run_round(ev)
                                                  : distributed_->run_round(ev));
        }

        if (centralized_) {
            const auto& st = centralized_->state();
            result.final_nodes = st.topo.nodes();
            if (st.tree) {
                result.final_edges = st.tree->edges;
                result.final_tree_edges = st.tree->edges;
            }
        } else {
            const auto& st = distributed_->state();
            result.final_nodes = st.topo.nodes();
            if (st.superposed) {
                result.final_edges = st.superposed->edges;
                result.final_tree_edges = reference_tree(*st.superposed);
            }
        }
        return result;
    }

private:
    double range_for(NodeId id) const {
        if (sc_.mode == ProtocolMode::centralized)
            return id == kLeaderId ? *sc_.d_leader : *sc_.d_normal;
        return *sc_.d_max;
    }

    const Topology& topo() const {
        return centralized_ ? centralized_->state().topo : distributed_->state().topo;
    }

    // Draws `count` distinct ids; the leader never leaves a centralized run.
    std::vector<NodeId> pick_members(int count, bool for_leave) {
        std::vector<NodeId> pool;
        for (const NodeState& n : topo().nodes()) {
            if (for_leave && sc_.mode == ProtocolMode::centralized && n.id == kLeaderId) continue;
            pool.push_back(n.id);
        }
        if (static_cast<int>(pool.size()) < count)
            throw Error("schedule: not enough eligible nodes (need " + std::to_string(count) +
                        ", have " + std::to_string(pool.size()) + ")");
        std::vector<NodeId> picked;
        for (int c = 0; c < count; ++c) {
            const std::size_t idx = events_rng_.next_below(pool.size());
            picked.push_back(pool[idx]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
        }
        std::sort(picked.begin(), picked.end());
        return picked;
    }

    NetworkEvent resolve(const ScheduledEvent& sev) {
        using Action = ScheduledEvent::Action;
        switch (sev.action) {
            case Action::join_random: {
                std::vector<NodeState> joins;
                for (int c = 0; c < sev.count; ++c) {
                    NodeState node;
                    node.id = next_id_++;
                    node.position.x = events_rng_.next_double(0.0, sc_.area_w);
                    node.position.y = events_rng_.next_double(0.0, sc_.area_h);
                    node.power_available = events_rng_.next_double(sc_.pa_min, sc_.pa_max);
                    node.transmission_range = range_for(node.id);
                    joins.push_back(node);
                }
                return NetworkEvent::join(std::move(joins));
            }
            case Action::join_explicit: {
                NodeState node;
                node.id = sev.id;
                node.position = sev.position;
                node.power_available = sev.value;
                node.transmission_range = range_for(sev.id);
                next_id_ = std::max(next_id_, sev.id + 1);
                return NetworkEvent::join({node});
            }
            case Action::leave_id:
                return NetworkEvent::leave({sev.id});
            case Action::leave_random:
                return NetworkEvent::leave(pick_members(sev.count, true));
            case Action::move_id:
                return NetworkEvent::move({{sev.id, sev.position}});
            case Action::move_random: {
                std::vector<std::pair<NodeId, Vec2>> moves;
                for (NodeId id : pick_members(sev.count, false)) {
                    Vec2 pos{events_rng_.next_double(0.0, sc_.area_w),
                             events_rng_.next_double(0.0, sc_.area_h)};
                    moves.emplace_back(id, pos);
                }
                return NetworkEvent::move(std::move(moves));
            }
            case Action::power_id:
                return NetworkEvent::power({{sev.id, sev.value}});
            case Action::power_random: {
                std::vector<std::pair<NodeId, double>> updates;
                for (NodeId id : pick_members(sev.count, false))
                    updates.emplace_back(id, events_rng_.next_double(sc_.pa_min, sc_.pa_max));
                return NetworkEvent::power(std::move(updates));
            }
        }
        throw Error("schedule: unhandled action");
    }

    // BFS tree from the smallest node, used only to style the DOT output.
    static std::vector<EdgeKey> reference_tree(const SuperposedGraph& g) {
        if (g.nodes.empty()) return {};
        std::map<NodeId, std::vector<NodeId>> adj;
        for (NodeId id : g.nodes) adj[id];
        for (const EdgeKey& e : g.edges) {
            adj[e.a].push_back(e.b);
            adj[e.b].push_back(e.a);
        }
        for (auto& [id, nbs] : adj) std::sort(nbs.begin(), nbs.end());

        std::vector<EdgeKey> tree;
        std::set<NodeId> seen{g.nodes.front()};
        std::queue<NodeId> q;
        q.push(g.nodes.front());
        while (!q.empty()) {
            const NodeId cur = q.front();
            q.pop();
            for (NodeId nb : adj[cur]) {
                if (seen.insert(nb).second) {
                    tree.emplace_back(cur, nb);
                    q.push(nb);
                }
            }
        }
        std::sort(tree.begin(), tree.end());
        return tree;
    }

    Scenario sc_;
    SplitMix64 events_rng_;
    NodeId next_id_ = 1;
    std::optional<CentralizedProtocol> centralized_;
    std::optional<DistributedProtocol> distributed_;
};

}  // namespace

RunResult run_scenario(const Scenario& sc) { return ScenarioRunner(sc).run(); }

SweepResult sweep_dmax(std::uint64_t base_seed, int seed_count, std::vector<double> grid,
                       const SweepConfig& config) {
    if (seed_count < 1) throw ConfigError("sweep_dmax: seed_count must be >= 1");
    if (grid.empty()) throw ConfigError("sweep_dmax: empty grid");
    std::sort(grid.begin(), grid.end());

    SweepResult result;
    result.config = config;
    const std::uint64_t sweep_seed = derive_seed(base_seed, Stream::sweep);

    for (double d_max : grid) {
        SweepPoint point;
        point.d_max = d_max;
        for (int s = 0; s < seed_count; ++s) {
            SweepInstance inst;
            std::vector<NodeState> nodes;
            bool connected = false;
            for (int attempt = 0; attempt <= config.max_redraws; ++attempt) {
                const std::uint64_t placement_seed =
                    derive_seed(sweep_seed, static_cast<std::uint64_t>(s) * 1000003ULL +
                                                static_cast<std::uint64_t>(attempt));
                nodes = random_placement(placement_seed, config.node_count, config.area_w,
                                         config.area_h, config.pa_min, config.pa_max);
                for (NodeState& node : nodes) node.transmission_range = d_max;
                inst.seed = placement_seed;
                inst.redraws = attempt;
                if (is_connected(build_topology(nodes, NetMode::homogeneous))) {
                    connected = true;
                    break;
                }
            }
            if (!connected) {
                inst.skipped = true;
                point.instances.push_back(inst);
                continue;
            }

            const ConnectivityBounds bounds = compute_connectivity_bounds(nodes);
            inst.d_low = bounds.d_low;
            inst.d_upper = bounds.d_upper;

            // k = 0 bootstrap: every LST is the true MST of its
            // neighborhood, i.e. the superposition is derived under LMST.
            WeightParams params{config.weight_m, config.weight_alpha, config.weight_beta, d_max};
            DistributedProtocol protocol(nodes, params, inst.seed);
            const MetricsReport report = protocol.run_bootstrap();
            inst.redundant = report.redundant_edges;
            point.instances.push_back(inst);
        }

        double sum = 0.0;
        double count = 0.0;
        for (const SweepInstance& inst : point.instances) {
            if (inst.skipped) continue;
            sum += static_cast<double>(inst.redundant);
            count += 1.0;
        }
        if (count > 0.0) {
            point.mean_redundant = sum / count;
            double var = 0.0;
            for (const SweepInstance& inst : point.instances) {
                if (inst.skipped) continue;
                const double diff = static_cast<double>(inst.redundant) - point.mean_redundant;
                var += diff * diff;
            }
            point.stddev_redundant = std::sqrt(var / count);
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

void export_dot(std::span<const NodeState> nodes, std::span<const EdgeKey> edges,
                std::span<const EdgeKey> tree_edges, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write DOT file: " + path);

    out << "graph secure_links {\n";
    out << "  node [shape=circle, fixedsize=true, width=0.3, fontsize=8];\n";
    for (const NodeState& n : nodes) {
        out << "  " << n.id << " [pos=\"" << format_double(n.position.x) << ","
            << format_double(n.position.y) << "!\"];\n";
    }
    for (const EdgeKey& e : edges) {
        const bool in_tree =
            std::binary_search(tree_edges.begin(), tree_edges.end(), e);
        out << "  " << e.a << " -- " << e.b;
        if (!in_tree) out << " [style=dashed, color=red]";  // redundant link
        out << ";\n";
    }
    out << "}\n";
    if (!out) throw Error("failed while writing DOT file: " + path);
}

namespace {

constexpr const char* kCsvHeader =
    "round,event_kind,epoch,hello,id_msg,weight_msg,notification,key_payload,"
    "new_exchanges,reused_links,redundant_edges,max_depth,duplicates,aborted";

}  // namespace

void export_csv(std::span<const MetricsReport> reports, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write CSV file: " + path);
    out << kCsvHeader << "\n";
    for (const MetricsReport& r : reports) {
        out << r.round << ',' << r.event_kind << ',' << r.epoch << ',' << r.hello << ','
            << r.id_msg << ',' << r.weight_msg << ',' << r.notification << ',' << r.key_payload
            << ',' << r.new_exchanges << ',' << r.reused_links << ',' << r.redundant_edges << ','
            << r.max_depth << ',' << r.duplicates << ',' << (r.aborted ? 1 : 0) << "\n";
    }
    if (!out) throw Error("failed while writing CSV file: " + path);
}

std::vector<MetricsReport> import_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw Error("unexpected CSV header in " + path);

    std::vector<MetricsReport> reports;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream row(line);
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 14) throw Error("malformed CSV row in " + path + ": " + line);

        MetricsReport r;
        r.round = std::stoi(fields[0]);
        r.event_kind = fields[1];
        r.epoch = std::stoi(fields[2]);
        r.hello = std::stoull(fields[3]);
        r.id_msg = std::stoull(fields[4]);
        r.weight_msg = std::stoull(fields[5]);
        r.notification = std::stoull(fields[6]);
        r.key_payload = std::stoull(fields[7]);
        r.new_exchanges = std::stoull(fields[8]);
        r.reused_links = std::stoull(fields[9]);
        r.redundant_edges = std::stoull(fields[10]);
        r.max_depth = std::stoi(fields[11]);
        r.duplicates = std::stoull(fields[12]);
        r.aborted = fields[13] == "1";
        reports.push_back(std::move(r));
    }
    return reports;
}

void export_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write CSV file: " + path);
    out << "d_max,instances,skipped,total_redraws,mean_redundant,stddev_redundant\n";
    for (const SweepPoint& p : result.points) {
        std::size_t skipped = 0;
        int redraws = 0;
        for (const SweepInstance& inst : p.instances) {
            skipped += inst.skipped ? 1 : 0;
            redraws += inst.redraws;
        }
        out << format_double(p.d_max) << ',' << p.instances.size() << ',' << skipped << ','
            << redraws << ',' << format_double(p.mean_redundant) << ','
            << format_double(p.stddev_redundant) << "\n";
    }
    if (!out) throw Error("failed while writing CSV file: " + path);
}

std::vector<std::string> run_scenario_to_files(const Scenario& sc, const std::string& out_dir,
                                               bool write_csv, bool write_dot) {
    std::filesystem::create_directories(out_dir);
    const RunResult result = run_scenario(sc);

    std::vector<std::string> written;
    if (write_csv) {
        const std::string csv_path = (std::filesystem::path(out_dir) / "metrics.csv").string();
        export_csv(result.reports, csv_path);
        written.push_back(csv_path);
    }
    if (write_dot) {
        const std::string dot_path = (std::filesystem::path(out_dir) / "final.dot").string();
        export_dot(result.final_nodes, result.final_edges, result.final_tree_edges, dot_path);
        written.push_back(dot_path);
    }
    return written;
}

}  // namespace hsk
