#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hsk/harness.hpp"
#include "hsk/protocol_centralized.hpp"
#include "hsk/protocol_distributed.hpp"

namespace py = pybind11;
using namespace hsk;

namespace {

std::vector<std::pair<NodeId, NodeId>> edge_pairs(const std::vector<EdgeKey>& edges) {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edges.size());
    for (const EdgeKey& e : edges) out.emplace_back(e.a, e.b);
    return out;
}

std::vector<EdgeKey> edge_keys(const std::vector<std::pair<NodeId, NodeId>>& pairs) {
    std::vector<EdgeKey> out;
    out.reserve(pairs.size());
    for (const auto& [a, b] : pairs) out.emplace_back(a, b);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spanning-tree based group key agreement protocols for MANETs";

    py::register_exception<DisconnectedError>(m, "DisconnectedGraphError");

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("__repr__", [](const Vec2& v) {
            std::ostringstream s;
            s << "Vec2(" << v.x << ", " << v.y << ")";
            return s.str();
        });

    py::class_<NodeState>(m, "NodeState")
        .def(py::init([](NodeId id, double x, double y, double pa, double range) {
                 return NodeState{id, Vec2{x, y}, pa, range};
             }),
             py::arg("id"), py::arg("x"), py::arg("y"), py::arg("power_available") = 0.0,
             py::arg("transmission_range") = 1.0)
        .def_readwrite("id", &NodeState::id)
        .def_readwrite("position", &NodeState::position)
        .def_readwrite("power_available", &NodeState::power_available)
        .def_readwrite("transmission_range", &NodeState::transmission_range)
        .def("__repr__", [](const NodeState& n) {
            std::ostringstream s;
            s << "NodeState(id=" << n.id << ", x=" << n.position.x << ", y=" << n.position.y
              << ", pa=" << n.power_available << ", range=" << n.transmission_range << ")";
            return s.str();
        });

    py::enum_<NetMode>(m, "NetMode")
        .value("unbalanced", NetMode::unbalanced)
        .value("homogeneous", NetMode::homogeneous);

    py::enum_<EventKind>(m, "EventKind")
        .value("node_join", EventKind::node_join)
        .value("node_leave", EventKind::node_leave)
        .value("position_update", EventKind::position_update)
        .value("power_update", EventKind::power_update);

    py::class_<NetworkEvent>(m, "NetworkEvent")
        .def_readonly("kind", &NetworkEvent::kind)
        .def_static("join", &NetworkEvent::join, py::arg("nodes"))
        .def_static("leave", &NetworkEvent::leave, py::arg("ids"))
        .def_static("move",
                    [](const std::vector<std::pair<NodeId, std::pair<double, double>>>& updates) {
                        std::vector<std::pair<NodeId, Vec2>> moves;
                        for (const auto& [id, pos] : updates)
                            moves.emplace_back(id, Vec2{pos.first, pos.second});
                        return NetworkEvent::move(std::move(moves));
                    },
                    py::arg("updates"))
        .def_static("power", &NetworkEvent::power, py::arg("updates"));

    py::class_<Topology>(m, "Topology")
        .def_property_readonly("mode", &Topology::mode)
        .def_property_readonly("round_index", &Topology::round_index)
        .def_property_readonly("nodes", &Topology::nodes)
        .def_property_readonly("edges", [](const Topology& t) { return edge_pairs(t.edges()); })
        .def("contains", &Topology::contains)
        .def("node", &Topology::node, py::return_value_policy::copy)
        .def("has_edge", &Topology::has_edge)
        .def("__len__", &Topology::node_count);

    m.def("build_topology", &build_topology, py::arg("nodes"), py::arg("mode"),
          py::arg("round_index") = 0);
    m.def("apply_event", &apply_event, py::arg("topology"), py::arg("event"));
    m.def("directly_connected", &directly_connected, py::arg("topology"), py::arg("a"),
          py::arg("b"));
    m.def("is_connected", &is_connected, py::arg("topology"));
    m.def("connected_components", &connected_components, py::arg("topology"));
    m.def("neighborhood_subgraph", &neighborhood_subgraph, py::arg("topology"), py::arg("center"));

    py::class_<WeightParams>(m, "WeightParams")
        .def(py::init<double, double, double, double>(), py::arg("big_m") = 1000.0,
             py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("range_cutoff") = 0.0)
        .def_readwrite("big_m", &WeightParams::big_m)
        .def_readwrite("alpha", &WeightParams::alpha)
        .def_readwrite("beta", &WeightParams::beta)
        .def_readwrite("range_cutoff", &WeightParams::range_cutoff);

    m.def("edge_weight", &edge_weight, py::arg("d_ij"), py::arg("pa_i"), py::arg("pa_j"),
          py::arg("params"));

    py::class_<WeightedTopology>(m, "WeightedTopology")
        .def_readonly("topo", &WeightedTopology::topo)
        .def_readonly("weights", &WeightedTopology::weights)
        .def("weight_of",
             [](const WeightedTopology& w, NodeId a, NodeId b) { return w.weight_of(EdgeKey(a, b)); },
             py::arg("a"), py::arg("b"));

    m.def("recompute_weights",
          py::overload_cast<const Topology&, const WeightParams&>(&recompute_weights),
          py::arg("topology"), py::arg("params"));

    py::class_<SpanningForest>(m, "SpanningForest")
        .def(py::init([](const std::vector<NodeId>& nodes,
                         const std::vector<std::pair<NodeId, NodeId>>& edges) {
                 SpanningForest f;
                 f.nodes = nodes;
                 f.preserved_edges = edge_keys(edges);
                 std::sort(f.nodes.begin(), f.nodes.end());
                 std::sort(f.preserved_edges.begin(), f.preserved_edges.end());
                 return f;
             }),
             py::arg("nodes"), py::arg("preserved_edges"))
        .def_property_readonly("nodes", [](const SpanningForest& f) { return f.nodes; })
        .def_property_readonly("preserved_edges",
                               [](const SpanningForest& f) { return edge_pairs(f.preserved_edges); });

    py::class_<SpanningTree>(m, "SpanningTree")
        .def_property_readonly("nodes", [](const SpanningTree& t) { return t.nodes; })
        .def_property_readonly("edges", [](const SpanningTree& t) { return edge_pairs(t.edges); })
        .def_readonly("root", &SpanningTree::root)
        .def("depth_of", &SpanningTree::depth_of)
        .def("height", &SpanningTree::height)
        .def("children_of", &SpanningTree::children_of)
        .def("parent_of", [](const SpanningTree& t, NodeId id) -> std::optional<NodeId> {
            auto it = t.parent.find(id);
            if (it == t.parent.end()) return std::nullopt;
            return it->second;
        })
        .def("total_weight", &SpanningTree::total_weight);

    py::class_<SuperposedGraph>(m, "SuperposedGraph")
        .def_property_readonly("nodes", [](const SuperposedGraph& g) { return g.nodes; })
        .def_property_readonly("edges", [](const SuperposedGraph& g) { return edge_pairs(g.edges); });

    m.def("extended_kruskal",
          [](const WeightedTopology& w, const SpanningForest& preserved,
             std::optional<NodeId> root) {
              return extended_kruskal(w, preserved, lexicographic_tie_rule, root);
          },
          py::arg("weighted_topology"), py::arg("preserved"), py::arg("root") = std::nullopt);
    m.def("kruskal_mst",
          [](const WeightedTopology& w) { return kruskal_mst(w); },
          py::arg("weighted_topology"));
    m.def("prim_mst", &prim_mst, py::arg("weighted_topology"), py::arg("start"));
    m.def("derive_preserved_forest",
          [](const std::vector<std::pair<NodeId, NodeId>>& prev, const Topology& topo) {
              const auto keys = edge_keys(prev);
              return derive_preserved_forest(keys, topo);
          },
          py::arg("previous_secure_links"), py::arg("new_topology"));
    m.def("build_lst",
          [](const WeightedTopology& sub, const SpanningForest& preserved, NodeId leader) {
              return build_lst(sub, preserved, leader);
          },
          py::arg("neighborhood"), py::arg("preserved"), py::arg("local_leader"));
    m.def("superpose", &superpose, py::arg("lsts"));
    m.def("redundant_edge_count", &redundant_edge_count, py::arg("graph"));
    m.def("select_initiator", &select_initiator, py::arg("members"), py::arg("seed"));

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("round", &MetricsReport::round)
        .def_readonly("event_kind", &MetricsReport::event_kind)
        .def_readonly("epoch", &MetricsReport::epoch)
        .def_readonly("hello", &MetricsReport::hello)
        .def_readonly("id_msg", &MetricsReport::id_msg)
        .def_readonly("weight_msg", &MetricsReport::weight_msg)
        .def_readonly("notification", &MetricsReport::notification)
        .def_readonly("key_payload", &MetricsReport::key_payload)
        .def_readonly("new_exchanges", &MetricsReport::new_exchanges)
        .def_readonly("reused_links", &MetricsReport::reused_links)
        .def_readonly("redundant_edges", &MetricsReport::redundant_edges)
        .def_readonly("max_depth", &MetricsReport::max_depth)
        .def_readonly("duplicates", &MetricsReport::duplicates)
        .def_readonly("aborted", &MetricsReport::aborted)
        .def("__repr__", [](const MetricsReport& r) {
            std::ostringstream s;
            s << "MetricsReport(round=" << r.round << ", event=" << r.event_kind
              << ", epoch=" << r.epoch << ", new=" << r.new_exchanges
              << ", reused=" << r.reused_links << (r.aborted ? ", aborted" : "") << ")";
            return s.str();
        });

    py::class_<ProtocolOptions>(m, "ProtocolOptions")
        .def(py::init<>())
        .def_readwrite("key_exchange", &ProtocolOptions::key_exchange)
        .def_readwrite("cipher", &ProtocolOptions::cipher)
        .def_readwrite("session_key_len", &ProtocolOptions::session_key_len)
        .def_readwrite("rekey_on_edge_events", &ProtocolOptions::rekey_on_edge_events);

    py::class_<CentralizedProtocol>(m, "CentralizedProtocol")
        .def(py::init<std::vector<NodeState>, WeightParams, std::uint64_t, ProtocolOptions>(),
             py::arg("initial_nodes"), py::arg("weights"), py::arg("seed"),
             py::arg("options") = ProtocolOptions{})
        .def("run_bootstrap", &CentralizedProtocol::run_bootstrap)
        .def("run_round", &CentralizedProtocol::run_round, py::arg("event"))
        .def("run_topology_construction", &CentralizedProtocol::run_topology_construction)
        .def_property_readonly("topology",
                               [](const CentralizedProtocol& p) { return p.state().topo; })
        .def_property_readonly("epoch",
                               [](const CentralizedProtocol& p) {
                                   return p.state().session ? p.state().session->epoch : 0;
                               })
        .def_property_readonly("tree_edges",
                               [](const CentralizedProtocol& p) {
                                   return p.state().tree ? edge_pairs(p.state().tree->edges)
                                                         : std::vector<std::pair<NodeId, NodeId>>{};
                               })
        .def_property_readonly("preserved_edges",
                               [](const CentralizedProtocol& p) {
                                   return edge_pairs(p.state().preserved_edges);
                               });

    py::class_<DistributedProtocol>(m, "DistributedProtocol")
        .def(py::init<std::vector<NodeState>, WeightParams, std::uint64_t, ProtocolOptions>(),
             py::arg("initial_nodes"), py::arg("weights"), py::arg("seed"),
             py::arg("options") = ProtocolOptions{})
        .def("run_bootstrap", &DistributedProtocol::run_bootstrap)
        .def("run_round", &DistributedProtocol::run_round, py::arg("event"))
        .def_property_readonly("topology",
                               [](const DistributedProtocol& p) { return p.state().topo; })
        .def_property_readonly("epoch",
                               [](const DistributedProtocol& p) {
                                   return p.state().session ? p.state().session->epoch : 0;
                               })
        .def_property_readonly("superposed_edges",
                               [](const DistributedProtocol& p) {
                                   return p.state().superposed
                                              ? edge_pairs(p.state().superposed->edges)
                                              : std::vector<std::pair<NodeId, NodeId>>{};
                               })
        .def_property_readonly("last_initiator",
                               [](const DistributedProtocol& p) { return p.state().last_initiator; });

    py::enum_<ProtocolMode>(m, "ProtocolMode")
        .value("centralized", ProtocolMode::centralized)
        .value("distributed", ProtocolMode::distributed);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("node_count", &Scenario::node_count)
        .def_readwrite("area_w", &Scenario::area_w)
        .def_readwrite("area_h", &Scenario::area_h)
        .def_readwrite("mode", &Scenario::mode)
        .def_readwrite("primitive", &Scenario::primitive);

    m.def("parse_scenario", &parse_scenario, py::arg("text"));
    m.def("load_scenario", &load_scenario, py::arg("path"));

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("reports", &RunResult::reports)
        .def_property_readonly("final_edges",
                               [](const RunResult& r) { return edge_pairs(r.final_edges); })
        .def_property_readonly("final_tree_edges",
                               [](const RunResult& r) { return edge_pairs(r.final_tree_edges); });

    m.def("run_scenario", &run_scenario, py::arg("scenario"));
    m.def("run_scenario_to_files", &run_scenario_to_files, py::arg("scenario"),
          py::arg("out_dir"), py::arg("write_csv") = true, py::arg("write_dot") = true);

    m.def("random_placement", &random_placement, py::arg("seed"), py::arg("n"), py::arg("area_w"),
          py::arg("area_h"), py::arg("pa_min") = 0.0, py::arg("pa_max") = 100.0);

    py::class_<ConnectivityBounds>(m, "ConnectivityBounds")
        .def_readonly("d_low", &ConnectivityBounds::d_low)
        .def_readonly("d_upper", &ConnectivityBounds::d_upper);

    m.def("compute_connectivity_bounds",
          [](const std::vector<NodeState>& nodes) { return compute_connectivity_bounds(nodes); },
          py::arg("nodes"));

    py::class_<SweepInstance>(m, "SweepInstance")
        .def_readonly("seed", &SweepInstance::seed)
        .def_readonly("d_low", &SweepInstance::d_low)
        .def_readonly("d_upper", &SweepInstance::d_upper)
        .def_readonly("redundant", &SweepInstance::redundant)
        .def_readonly("redraws", &SweepInstance::redraws)
        .def_readonly("skipped", &SweepInstance::skipped);

    py::class_<SweepPoint>(m, "SweepPoint")
        .def_readonly("d_max", &SweepPoint::d_max)
        .def_readonly("mean_redundant", &SweepPoint::mean_redundant)
        .def_readonly("stddev_redundant", &SweepPoint::stddev_redundant)
        .def_readonly("instances", &SweepPoint::instances);

    py::class_<SweepConfig>(m, "SweepConfig")
        .def(py::init<>())
        .def_readwrite("node_count", &SweepConfig::node_count)
        .def_readwrite("area_w", &SweepConfig::area_w)
        .def_readwrite("area_h", &SweepConfig::area_h)
        .def_readwrite("pa_min", &SweepConfig::pa_min)
        .def_readwrite("pa_max", &SweepConfig::pa_max)
        .def_readwrite("max_redraws", &SweepConfig::max_redraws);

    py::class_<SweepResult>(m, "SweepResult").def_readonly("points", &SweepResult::points);

    m.def("sweep_dmax", &sweep_dmax, py::arg("base_seed"), py::arg("seed_count"), py::arg("grid"),
          py::arg("config") = SweepConfig{});

    m.def("export_csv",
          [](const std::vector<MetricsReport>& reports, const std::string& path) {
              export_csv(reports, path);
          },
          py::arg("reports"), py::arg("path"));
    m.def("import_csv", &import_csv, py::arg("path"));
}
