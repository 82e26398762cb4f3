#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace perco {

using Vertex = std::uint32_t;

// Simple undirected graph in CSR form: neighbour lists are sorted, vertex
// ids are 0..n-1, and (u,v) appears in both directions. Immutable after
// construction, so it can be shared read-only across workers.
struct GraphSample {
    std::uint32_t n = 0;
    std::vector<std::uint64_t> offsets;   // size n+1
    std::vector<Vertex> neighbors;        // size 2*edge_count
    std::uint64_t edge_count = 0;
    std::uint64_t seed = 0;               // reproducibility token
    double p = 0.0;                       // sampling metadata (NaN when loaded)

    std::span<const Vertex> adj(Vertex v) const {
        return {neighbors.data() + offsets[v],
                neighbors.data() + offsets[v + 1]};
    }
    std::uint32_t degree(Vertex v) const {
        return static_cast<std::uint32_t>(offsets[v + 1] - offsets[v]);
    }
};

enum class SampleMethod { Auto, Sparse, Dense };

// Density threshold between the two G(n,p) sampling paths: below it, edges
// are drawn by geometric gap-skipping over the C(n,2) linearised pair
// indices (expected O(m) work); at or above it, every pair gets a Bernoulli
// draw. Both paths produce identically distributed graphs.
inline constexpr double kSparseDenseSwitch = 0.1;

GraphSample sample_gnp(std::uint32_t n, double p, std::uint64_t seed,
                       SampleMethod method = SampleMethod::Auto);

// Builds a graph from explicit u<v pairs (validates simplicity).
GraphSample graph_from_edges(std::uint32_t n,
                             std::vector<std::pair<Vertex, Vertex>> edges);

std::map<std::uint32_t, std::uint64_t> degree_histogram(const GraphSample& g);

// Edge-list text format: first line "n m", then m lines "u v" with u < v.
void write_edge_list(const GraphSample& g, std::ostream& out);
GraphSample read_edge_list(std::istream& in);

namespace detail {
// Maps a linear pair index e in [0, n(n-1)/2) to the e-th pair (u,v), u < v,
// in lexicographic order.
std::pair<Vertex, Vertex> unrank_pair(std::uint32_t n, std::uint64_t e);
}  // namespace detail

}  // namespace perco
