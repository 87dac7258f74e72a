#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hsk/metrics.hpp"
#include "hsk/net_model.hpp"
#include "hsk/secure_links.hpp"
#include "hsk/spanning.hpp"
#include "hsk/weighting.hpp"

namespace hsk {

// One encrypted session-key hop. Ciphertexts are kept so tests can check
// that pruned link keys open none of them.
struct PayloadRecord {
    NodeId from = 0;
    NodeId to = 0;
    int depth = 0;
    Bytes ciphertext;
    bool duplicate = false;
};

struct DeliveryReport {
    std::vector<PayloadRecord> payloads;  // send order
    std::map<NodeId, int> depth;          // first-receipt depth, source = 0
    std::uint64_t duplicates = 0;
    int max_depth = 0;

    std::uint64_t payload_count() const { return payloads.size(); }
};

// Root wraps the key once per child; every other node receives exactly one
// payload from its parent and re-wraps for its children. Throws
// DistributionError naming the edge when a link key is missing.
DeliveryReport distribute_session_key(const SpanningTree& tree, const SecureLinkStore& store,
                                      const SymmetricCipher& cipher, const SessionKey& sk);

struct ProtocolOptions {
    std::string key_exchange = "test-double";
    std::string cipher = "xor-siv";
    std::size_t session_key_len = 32;
    // Edge-event rounds repair the tree but keep the session key unless
    // this is set.
    bool rekey_on_edge_events = false;
};

struct CentralizedState {
    Topology topo;
    std::optional<SpanningTree> tree;  // G_k^+
    std::vector<EdgeKey> preserved_edges;  // G_k^- of the last round
    SecureLinkStore store;
    std::optional<SessionKey> session;
    MessageLog log;
    int round = -1;  // k of the last executed round
    std::optional<std::vector<std::vector<NodeId>>> last_components;  // set when aborted
    std::optional<DeliveryReport> last_delivery;
};

// Six-step round loop for unbalanced MANETs, leader = node 1 = tree root.
// A round whose topology comes out disconnected is aborted: the physical
// snapshot advances but tree, store and session key stay untouched and the
// report is flagged. A node event whose round aborted leaves a rekey
// pending, executed on the next completed round.
class CentralizedProtocol {
public:
    CentralizedProtocol(std::vector<NodeState> initial_nodes, WeightParams weights,
                        std::uint64_t seed, ProtocolOptions options = {});

    // Round k=0: initial key establishment over the starting membership.
    MetricsReport run_bootstrap();
    MetricsReport run_round(const NetworkEvent& ev);

    // Procedure T-C on its own: every node broadcasts a hello, every normal
    // node reports its neighbor list, and the leader rebuilds its view of
    // the topology. run_round performs the same step internally; this
    // exists for callers that only need the discovery pass.
    Topology run_topology_construction();

    const CentralizedState& state() const { return state_; }
    const WeightParams& weight_params() const { return weight_params_; }

private:
    MetricsReport execute_round(const Topology& next_topo, EventKind kind,
                                const std::string& kind_label);

    CentralizedState state_;
    WeightParams weight_params_;
    ProtocolOptions options_;
    std::unique_ptr<KeyExchangePrimitive> kx_;
    std::unique_ptr<SymmetricCipher> cipher_;
    SplitMix64 kx_rng_;
    SplitMix64 session_rng_;
    bool rekey_pending_ = false;
    std::vector<NodeState> pending_initial_;
};

}  // namespace hsk
