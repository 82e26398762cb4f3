#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perco/graph.hpp"
#include "perco/rules.hpp"

namespace perco {

// One-vertex-per-step exploration record. a_series[t] is the number of
// active vertices after t exploration steps; the process stops at the first
// t with a_series[t] == t, and the final active count equals that t.
struct Trajectory {
    std::vector<std::uint32_t> a_series;   // A(0) .. A(T)
    std::uint64_t stopping_time = 0;       // T
    std::uint64_t a_star = 0;              // |final active set| == T
    std::vector<Vertex> final_set;         // sorted

    std::uint64_t a0() const { return a_series.empty() ? 0 : a_series.front(); }
};

// Queue-driven exploration: pop the oldest unused active vertex, give every
// neighbour a mark, then activate the marked vertices that reached their
// threshold (appended in ascending label order). Stops when the queue
// empties.
Trajectory run_percolation(const GraphSample& g, std::span<const Vertex> initial,
                           const ActivationRule& rule);
Trajectory run_percolation(const GraphSample& g, const InitialSpec& init,
                           const ActivationRule& rule);

// Same dynamics but the next explored vertex is drawn uniformly from the
// pending set; the final set must not depend on the order.
Trajectory run_with_order(const GraphSample& g, std::span<const Vertex> initial,
                          const ActivationRule& rule, std::uint64_t order_seed);
Trajectory run_with_order(const GraphSample& g, const InitialSpec& init,
                          const ActivationRule& rule, std::uint64_t order_seed);

// Generation-sweep fixed point: repeatedly activate every inactive vertex
// whose active-neighbour count meets the rule against its full degree,
// until a sweep changes nothing. generation[v] is the sweep index at which
// v became active (0 for the initial set, -1 for never).
struct FixedPointResult {
    std::vector<Vertex> final_set;        // sorted
    std::vector<std::int32_t> generation; // size n
};

FixedPointResult final_active_fixed_point(const GraphSample& g,
                                          std::span<const Vertex> initial,
                                          const ActivationRule& rule);
FixedPointResult final_active_fixed_point(const GraphSample& g,
                                          const InitialSpec& init,
                                          const ActivationRule& rule);

}  // namespace perco
