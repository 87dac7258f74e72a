#include "hsk/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsk/rng.hpp"

namespace hsk {

double edge_weight(double d_ij, double pa_i, double pa_j, const WeightParams& params) {
    if (d_ij < 0.0) throw ConfigError("edge_weight: distance must be nonnegative");
    if (pa_i < 0.0 || pa_j < 0.0) throw ConfigError("edge_weight: power must be nonnegative");
    if (params.range_cutoff <= 0.0) throw ConfigError("edge_weight: range_cutoff must be > 0");
    if (d_ij > params.range_cutoff) return kInfiniteWeight;

    const double w = params.big_m + params.alpha * d_ij - params.beta * std::min(pa_i, pa_j);
    if (!(w > 0.0)) {
        std::ostringstream msg;
        msg << "weight " << w << " not positive for d=" << d_ij << ", min PA="
            << std::min(pa_i, pa_j) << "; increase M or lower beta";
        throw ConfigError(msg.str());
    }
    return w;
}

void validate_weight_function(const WeightFunction& fn, double d_max, double pa_min,
                              double pa_max, std::uint64_t seed, int samples) {
    SplitMix64 rng(seed);
    for (int s = 0; s < samples; ++s) {
        const double d = rng.next_double(0.0, d_max);
        const double pa_i = rng.next_double(pa_min, pa_max);
        const double pa_j = rng.next_double(pa_min, pa_max);
        const double w = fn(d, pa_i, pa_j);
        if (!std::isfinite(w) || w <= 0.0)
            throw ConfigError("weight function must be positive and finite below the cutoff");

        // Nondecreasing in distance.
        const double farther = rng.next_double(d, d_max);
        if (fn(farther, pa_i, pa_j) + 1e-12 < w)
            throw ConfigError("weight function must be nondecreasing in distance");

        // Nonincreasing in min power: raise both PAs so the min cannot drop.
        const double lift = rng.next_double(0.0, pa_max - std::max(pa_i, pa_j));
        if (fn(d, pa_i + lift, pa_j + lift) > w + 1e-12)
            throw ConfigError("weight function must be nonincreasing in min power");
    }
}

double WeightedTopology::weight_of(const EdgeKey& e) const {
    const auto& edges = topo.edges();
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it == edges.end() || *it != e)
        throw LookupError("weight_of: (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                          ") is not an edge");
    return weights[static_cast<std::size_t>(it - edges.begin())];
}

WeightedTopology recompute_weights(const Topology& topo, const WeightParams& params) {
    WeightedTopology out;
    out.topo = topo;
    out.weights.reserve(topo.edges().size());
    for (const EdgeKey& e : topo.edges()) {
        const NodeState& u = topo.node(e.a);
        const NodeState& v = topo.node(e.b);
        const double w = edge_weight(distance(u.position, v.position), u.power_available,
                                     v.power_available, params);
        if (!std::isfinite(w))
            throw ConfigError("stored edge exceeds the weight cutoff; cutoff below edge rule");
        out.weights.push_back(w);
    }
    return out;
}

WeightedTopology recompute_weights(const Topology& topo, const WeightParams& params,
                                   const WeightFunction& fn) {
    WeightedTopology out;
    out.topo = topo;
    out.weights.reserve(topo.edges().size());
    for (const EdgeKey& e : topo.edges()) {
        const NodeState& u = topo.node(e.a);
        const NodeState& v = topo.node(e.b);
        const double d = distance(u.position, v.position);
        if (d > params.range_cutoff)
            throw ConfigError("stored edge exceeds the weight cutoff; cutoff below edge rule");
        const double w = fn(d, u.power_available, v.power_available);
        if (!std::isfinite(w) || w <= 0.0)
            throw ConfigError("custom weight function produced a nonpositive or infinite value");
        out.weights.push_back(w);
    }
    return out;
}

}  // namespace hsk
