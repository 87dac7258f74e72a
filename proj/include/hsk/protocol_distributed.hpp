#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hsk/protocol_centralized.hpp"

namespace hsk {

// First-receipt flood over the superposed graph. Payloads travel through a
// FIFO of sends; a node forwards once, on first receipt, to every neighbor
// that has not yet received the key (ascending id), so payloads already in
// flight toward a newly covered node are the only duplicates.
DeliveryReport flood_session_key(const SuperposedGraph& g, NodeId initiator,
                                 const SecureLinkStore& store, const SymmetricCipher& cipher,
                                 const SessionKey& sk);

// Seeded uniform choice among current members.
NodeId select_initiator(const std::vector<NodeId>& members, std::uint64_t seed);

struct DistributedState {
    Topology topo;
    std::map<NodeId, SpanningTree> lsts;
    std::optional<SuperposedGraph> superposed;  // G_k^+ analogue
    SecureLinkStore store;
    std::optional<SessionKey> session;
    MessageLog log;
    int round = -1;
    std::optional<std::vector<std::vector<NodeId>>> last_components;
    std::optional<DeliveryReport> last_delivery;
    NodeId last_initiator = 0;
    std::uint64_t lst_rebuilds = 0;  // last round
};

// LST-based protocol for homogeneous MANETs. Each node is the local leader
// of its neighborhood subgraph; a round rebuilds only the LSTs whose
// neighborhood actually changed, superposes them, keys the new edges and
// floods a fresh session key from a seeded initiator.
class DistributedProtocol {
public:
    DistributedProtocol(std::vector<NodeState> initial_nodes, WeightParams weights,
                        std::uint64_t seed, ProtocolOptions options = {});

    MetricsReport run_bootstrap();
    MetricsReport run_round(const NetworkEvent& ev);

    const DistributedState& state() const { return state_; }

private:
    MetricsReport execute_round(const Topology& next_topo, EventKind kind,
                                const std::string& kind_label);

    struct NeighborhoodSig {
        std::vector<NodeState> members;  // sorted by id

        friend bool operator==(const NeighborhoodSig&, const NeighborhoodSig&) = default;
    };

    DistributedState state_;
    WeightParams weight_params_;
    ProtocolOptions options_;
    std::unique_ptr<KeyExchangePrimitive> kx_;
    std::unique_ptr<SymmetricCipher> cipher_;
    SplitMix64 kx_rng_;
    SplitMix64 session_rng_;
    SplitMix64 initiator_rng_;
    bool rekey_pending_ = false;
    std::vector<NodeState> pending_initial_;
    std::map<NodeId, NeighborhoodSig> neighborhood_sigs_;
};

}  // namespace hsk
