#include "perco/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "perco/rng.hpp"

namespace perco {

namespace detail {

std::pair<Vertex, Vertex> unrank_pair(std::uint32_t n, std::uint64_t e) {
    // offset(u) = u*n - u*(u+1)/2 is the index of pair (u, u+1).
    auto offset = [n](std::uint64_t u) {
        return u * static_cast<std::uint64_t>(n) - u * (u + 1) / 2;
    };
    const double nd = static_cast<double>(n);
    double guess = std::floor(nd - 0.5 - std::sqrt((nd - 0.5) * (nd - 0.5) - 2.0 * static_cast<double>(e)));
    std::uint64_t u = guess <= 0.0 ? 0 : static_cast<std::uint64_t>(guess);
    if (u > n - 2) u = n - 2;
    while (u + 1 <= n - 2 && offset(u + 1) <= e) ++u;
    while (offset(u) > e) --u;
    const auto v = static_cast<std::uint64_t>(u + 1 + (e - offset(u)));
    return {static_cast<Vertex>(u), static_cast<Vertex>(v)};
}

}  // namespace detail

namespace {

GraphSample build_csr(std::uint32_t n, const std::vector<std::pair<Vertex, Vertex>>& edges,
                      std::uint64_t seed, double p) {
    GraphSample g;
    g.n = n;
    g.seed = seed;
    g.p = p;
    g.edge_count = edges.size();
    g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& [u, v] : edges) {
        ++g.offsets[u + 1];
        ++g.offsets[v + 1];
    }
    for (std::size_t i = 1; i <= n; ++i) g.offsets[i] += g.offsets[i - 1];
    g.neighbors.resize(2 * edges.size());
    std::vector<std::uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
    // Edges arrive in ascending (u,v) lexicographic order, which keeps every
    // per-vertex list sorted after this single fill pass.
    for (const auto& [u, v] : edges) {
        g.neighbors[cursor[u]++] = v;
        g.neighbors[cursor[v]++] = u;
    }
    return g;
}

}  // namespace

GraphSample sample_gnp(std::uint32_t n, double p, std::uint64_t seed, SampleMethod method) {
    if (n == 0) throw std::invalid_argument("sample_gnp: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_gnp: p must lie in [0,1]");

    std::vector<std::pair<Vertex, Vertex>> edges;
    const std::uint64_t total_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (p > 0.0 && total_pairs > 0) {
        std::mt19937_64 rng(seed);
        const bool sparse = method == SampleMethod::Sparse ||
                            (method == SampleMethod::Auto && p < kSparseDenseSwitch);
        if (p == 1.0) {
            for (Vertex u = 0; u + 1 < n; ++u)
                for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
        } else if (sparse) {
            edges.reserve(static_cast<std::size_t>(static_cast<double>(total_pairs) * p * 1.1) + 16);
            const double log_q = std::log1p(-p);
            std::uint64_t idx = 0;  // next candidate pair index
            while (idx < total_pairs) {
                const double gap = std::floor(std::log(positive_unit(rng)) / log_q);
                if (gap >= static_cast<double>(total_pairs - idx)) break;
                idx += static_cast<std::uint64_t>(gap);
                edges.push_back(detail::unrank_pair(n, idx));
                ++idx;
            }
        } else {
            for (Vertex u = 0; u + 1 < n; ++u)
                for (Vertex v = u + 1; v < n; ++v)
                    if (canonical_unit(rng) < p) edges.emplace_back(u, v);
        }
    }
    return build_csr(n, edges, seed, p);
}

GraphSample graph_from_edges(std::uint32_t n, std::vector<std::pair<Vertex, Vertex>> edges) {
    if (n == 0) throw std::invalid_argument("graph_from_edges: n must be >= 1");
    for (auto& [u, v] : edges) {
        if (u > v) std::swap(u, v);
        if (u == v) throw std::invalid_argument("graph_from_edges: self-loop");
        if (v >= n) throw std::invalid_argument("graph_from_edges: vertex id out of range");
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw std::invalid_argument("graph_from_edges: duplicate edge");
    auto g = build_csr(n, edges, 0, std::nan(""));
    return g;
}

std::map<std::uint32_t, std::uint64_t> degree_histogram(const GraphSample& g) {
    std::map<std::uint32_t, std::uint64_t> hist;
    for (Vertex v = 0; v < g.n; ++v) ++hist[g.degree(v)];
    return hist;
}

void write_edge_list(const GraphSample& g, std::ostream& out) {
    out << g.n << ' ' << g.edge_count << '\n';
    for (Vertex u = 0; u < g.n; ++u)
        for (Vertex v : g.adj(u))
            if (u < v) out << u << ' ' << v << '\n';
}

GraphSample read_edge_list(std::istream& in) {
    std::uint64_t n = 0, m = 0;
    if (!(in >> n >> m)) throw std::invalid_argument("edge list: missing 'n m' header");
    if (n == 0 || n > 0xFFFFFFFFull) throw std::invalid_argument("edge list: bad vertex count");
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        std::uint64_t u = 0, v = 0;
        if (!(in >> u >> v)) throw std::invalid_argument("edge list: truncated at edge " + std::to_string(i));
        if (u >= v) throw std::invalid_argument("edge list: edges must satisfy u < v");
        if (v >= n) throw std::invalid_argument("edge list: vertex id out of range");
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    return graph_from_edges(static_cast<std::uint32_t>(n), std::move(edges));
}

}  // namespace perco
