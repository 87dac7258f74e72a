#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "hsk/net_model.hpp"
#include "hsk/types.hpp"

namespace hsk {

// W = M + alpha*d - beta*min(PA_i, PA_j) for d <= range_cutoff, else +inf.
// M must be large enough that every admissible weight stays positive; the
// scenario loader checks M > beta * pa_max up front.
struct WeightParams {
    double big_m = 1000.0;
    double alpha = 1.0;
    double beta = 1.0;
    double range_cutoff = 0.0;
};

constexpr double kInfiniteWeight = std::numeric_limits<double>::infinity();

double edge_weight(double d_ij, double pa_i, double pa_j, const WeightParams& params);

// Any replacement weight function must follow the same qualitative rules as
// the shipped linear form: positive and finite below the cutoff,
// nondecreasing in distance, nonincreasing in min power.
using WeightFunction = std::function<double(double d_ij, double pa_i, double pa_j)>;

// Samples the function over the given input box and throws ConfigError on
// the first violated rule. Used by tests and by callers plugging in a
// custom function.
void validate_weight_function(const WeightFunction& fn, double d_max, double pa_min,
                              double pa_max, std::uint64_t seed, int samples = 2000);

// Topology snapshot plus one finite weight per edge, aligned with
// Topology::edges(). Non-edges are implicitly infinite.
struct WeightedTopology {
    Topology topo;
    std::vector<double> weights;

    double weight_of(const EdgeKey& e) const;  // throws LookupError for non-edges
};

WeightedTopology recompute_weights(const Topology& topo, const WeightParams& params);
WeightedTopology recompute_weights(const Topology& topo, const WeightParams& params,
                                   const WeightFunction& fn);

}  // namespace hsk
