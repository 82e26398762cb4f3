#include "perco/engine.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "perco/rng.hpp"

namespace perco {

namespace {

void check_initial(const GraphSample& g, std::span<const Vertex> initial) {
    for (Vertex v : initial)
        if (v >= g.n) throw std::invalid_argument("initial set: vertex id out of range");
}

std::vector<std::uint32_t> per_vertex_thresholds(const GraphSample& g,
                                                 const ActivationRule& rule) {
    std::vector<std::uint32_t> thr(g.n);
    for (Vertex v = 0; v < g.n; ++v) {
        const std::uint64_t t = threshold_marks(rule, g.degree(v));
        // A threshold above n can never be met; clamp keeps the counter in 32 bits.
        thr[v] = static_cast<std::uint32_t>(std::min<std::uint64_t>(t, g.n + 1ull));
    }
    return thr;
}

// Core exploration loop. next_index picks the queue slot to explore from
// [head, queue.size()); FIFO passes head, the randomized variant swaps in a
// random pending vertex.
template <typename NextIndex>
Trajectory explore(const GraphSample& g, std::span<const Vertex> initial,
                   const ActivationRule& rule, NextIndex&& next_index) {
    check_initial(g, initial);
    const auto thr = per_vertex_thresholds(g, rule);

    std::vector<std::uint32_t> marks(g.n, 0);
    std::vector<std::uint8_t> active(g.n, 0);
    std::vector<Vertex> queue;  // active vertices, explored from head
    queue.reserve(g.n);
    for (Vertex v : initial) {
        if (!active[v]) {
            active[v] = 1;
            queue.push_back(v);
        }
    }

    Trajectory traj;
    traj.a_series.reserve(queue.size() + 1);
    traj.a_series.push_back(static_cast<std::uint32_t>(queue.size()));

    std::size_t head = 0;
    std::uint32_t active_count = static_cast<std::uint32_t>(queue.size());
    while (head < queue.size()) {
        const std::size_t pick = next_index(head, queue.size());
        std::swap(queue[head], queue[pick]);
        const Vertex u = queue[head++];
        for (Vertex w : g.adj(u)) {
            if (++marks[w] >= thr[w] && !active[w]) {
                active[w] = 1;
                ++active_count;
                queue.push_back(w);
            }
        }
        traj.a_series.push_back(active_count);
    }

    traj.stopping_time = head;
    traj.a_star = active_count;
    traj.final_set.assign(queue.begin(), queue.end());
    std::sort(traj.final_set.begin(), traj.final_set.end());
    return traj;
}

}  // namespace

Trajectory run_percolation(const GraphSample& g, std::span<const Vertex> initial,
                           const ActivationRule& rule) {
    return explore(g, initial, rule,
                   [](std::size_t head, std::size_t) { return head; });
}

Trajectory run_percolation(const GraphSample& g, const InitialSpec& init,
                           const ActivationRule& rule) {
    const auto initial = draw_initial(init, g.n);
    return run_percolation(g, initial, rule);
}

Trajectory run_with_order(const GraphSample& g, std::span<const Vertex> initial,
                          const ActivationRule& rule, std::uint64_t order_seed) {
    std::mt19937_64 rng(order_seed);
    return explore(g, initial, rule, [&rng](std::size_t head, std::size_t size) {
        return head + static_cast<std::size_t>(bounded_u64(rng, size - head));
    });
}

Trajectory run_with_order(const GraphSample& g, const InitialSpec& init,
                          const ActivationRule& rule, std::uint64_t order_seed) {
    const auto initial = draw_initial(init, g.n);
    return run_with_order(g, initial, rule, order_seed);
}

FixedPointResult final_active_fixed_point(const GraphSample& g,
                                          std::span<const Vertex> initial,
                                          const ActivationRule& rule) {
    check_initial(g, initial);
    const auto thr = per_vertex_thresholds(g, rule);

    FixedPointResult res;
    res.generation.assign(g.n, -1);
    std::vector<std::uint8_t> active(g.n, 0);
    for (Vertex v : initial) {
        active[v] = 1;
        res.generation[v] = 0;
    }

    std::int32_t sweep = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        ++sweep;
        std::vector<Vertex> newly;
        for (Vertex v = 0; v < g.n; ++v) {
            if (active[v]) continue;
            std::uint32_t cnt = 0;
            for (Vertex w : g.adj(v)) cnt += active[w];
            if (cnt >= thr[v]) newly.push_back(v);
        }
        for (Vertex v : newly) {
            active[v] = 1;
            res.generation[v] = sweep;
            changed = true;
        }
    }

    for (Vertex v = 0; v < g.n; ++v)
        if (active[v]) res.final_set.push_back(v);
    return res;
}

FixedPointResult final_active_fixed_point(const GraphSample& g,
                                          const InitialSpec& init,
                                          const ActivationRule& rule) {
    const auto initial = draw_initial(init, g.n);
    return final_active_fixed_point(g, initial, rule);
}

}  // namespace perco
