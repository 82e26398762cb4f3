#include "perco/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "perco/engine.hpp"
#include "perco/harness.hpp"
#include "perco/rng.hpp"

namespace perco::oracle {

namespace {

// Naive activation test, kept deliberately separate from the engine's
// integer thresholds. long double keeps alpha*deg exact for the degrees the
// oracle ever sees (deg < 2^11).
bool meets_rule_naive(const ActivationRule& rule, std::uint64_t active_nbrs,
                      std::uint64_t deg) {
    if (rule.kind == ActivationRule::Kind::Classical) return active_nbrs >= rule.r;
    if (active_nbrs < 1) return false;
    const long double lhs = static_cast<long double>(active_nbrs);
    const long double rhs = (rule.kind == ActivationRule::Kind::Majority)
                                ? 0.5L * static_cast<long double>(deg)
                                : static_cast<long double>(rule.alpha) * static_cast<long double>(deg);
    return rule.strict ? lhs > rhs : lhs >= rhs;
}

std::uint64_t choose(std::uint32_t n, std::uint32_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// Direct binomial pmf, exact coefficients (n <= 20).
double binom_pmf_direct(std::uint32_t n, std::uint32_t k, double p) {
    return static_cast<double>(choose(n, k)) * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

}  // namespace

GraphSample graph_from_code(std::uint32_t n, std::uint64_t graph_code) {
    if (n == 0 || n > 11) throw std::invalid_argument("graph_from_code: n out of range");
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::uint32_t bit = 0;
    for (Vertex u = 0; u + 1 < n; ++u)
        for (Vertex v = u + 1; v < n; ++v, ++bit)
            if (graph_code & (1ull << bit)) edges.emplace_back(u, v);
    return graph_from_edges(n, std::move(edges));
}

std::vector<Vertex> mask_to_set(std::uint32_t n, std::uint32_t mask) {
    std::vector<Vertex> s;
    for (Vertex v = 0; v < n; ++v)
        if (mask & (1u << v)) s.push_back(v);
    return s;
}

std::vector<Vertex> mc_reference_percolation(const GraphSample& g,
                                             std::span<const Vertex> initial,
                                             const ActivationRule& rule) {
    std::vector<std::uint8_t> active(g.n, 0);
    for (Vertex v : initial) active[v] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Vertex v = 0; v < g.n; ++v) {
            if (active[v]) continue;
            std::uint64_t cnt = 0;
            for (Vertex w : g.adj(v)) cnt += active[w];
            if (meets_rule_naive(rule, cnt, g.degree(v))) {
                active[v] = 1;
                changed = true;
            }
        }
    }
    std::vector<Vertex> out;
    for (Vertex v = 0; v < g.n; ++v)
        if (active[v]) out.push_back(v);
    return out;
}

double exact_expected_final_size(std::uint32_t n, double p, std::uint32_t a0,
                                 const ActivationRule& rule) {
    if (n == 0 || n > 6)
        throw std::invalid_argument("exact_expected_final_size: n must lie in 1..6");
    if (a0 > n) throw std::invalid_argument("exact_expected_final_size: a0 exceeds n");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("exact_expected_final_size: p must lie in [0,1]");

    const std::uint32_t pairs = n * (n - 1) / 2;
    std::vector<std::uint32_t> initial_masks;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
        if (static_cast<std::uint32_t>(std::popcount(mask)) == a0) initial_masks.push_back(mask);
    const double mask_weight = 1.0 / static_cast<double>(initial_masks.size());

    double expectation = 0.0;
    for (std::uint64_t code = 0; code < (1ull << pairs); ++code) {
        const auto m = static_cast<std::uint32_t>(std::popcount(code));
        const double graph_weight =
            std::pow(p, m) * std::pow(1.0 - p, pairs - m);
        if (graph_weight == 0.0) continue;
        const auto g = graph_from_code(n, code);
        double mean_final = 0.0;
        for (std::uint32_t mask : initial_masks) {
            const auto init = mask_to_set(n, mask);
            mean_final += static_cast<double>(mc_reference_percolation(g, init, rule).size());
        }
        expectation += graph_weight * mean_final * mask_weight;
    }
    return expectation;
}

double exact_pi_plus_enumeration(std::uint32_t n, std::uint32_t t, double p) {
    if (n == 0 || n > 20)
        throw std::invalid_argument("exact_pi_plus_enumeration: n must lie in 1..20");
    if (t >= n) throw std::invalid_argument("exact_pi_plus_enumeration: t must satisfy t <= n-1");
    const std::uint32_t rest = n - 1 - t;
    double total = 0.0;
    for (std::uint32_t x = 0; x <= t; ++x)
        for (std::uint32_t y = 0; y <= rest; ++y)
            if (x >= std::max<std::uint32_t>(y, 1))
                total += binom_pmf_direct(t, x, p) * binom_pmf_direct(rest, y, p);
    return total;
}

ExhaustiveReport run_exhaustive_check(std::uint32_t max_n, unsigned threads) {
    if (max_n == 0 || max_n > 6)
        throw std::invalid_argument("run_exhaustive_check: max_n must lie in 1..6");

    ExhaustiveReport report;
    std::mutex mu;
    std::atomic<std::uint64_t> cases{0};
    std::atomic<std::uint64_t> sampled{0};

    const auto majority = ActivationRule::majority();
    std::vector<ActivationRule> sampled_rules = {
        ActivationRule::proportional(0.3), ActivationRule::proportional(0.5),
        ActivationRule::proportional(0.7), ActivationRule::classical(1),
        ActivationRule::classical(2),      ActivationRule::classical(3)};

    auto check_case = [&](std::uint32_t n, std::uint64_t code, const GraphSample& g,
                          std::uint32_t mask, const ActivationRule& rule, bool is_sampled) {
        const auto init = mask_to_set(n, mask);
        const auto traj = run_percolation(g, init, rule);
        const auto fixed = final_active_fixed_point(g, init, rule);
        const auto ref = mc_reference_percolation(g, init, rule);
        if (traj.final_set != ref || fixed.final_set != ref) {
            std::lock_guard<std::mutex> lock(mu);
            if (report.mismatches.size() < 16) {
                std::ostringstream os;
                os << "n=" << n << " graph_code=" << code << " mask=" << mask
                   << " rule=" << rule.describe() << " engine=" << traj.final_set.size()
                   << " fixed_point=" << fixed.final_set.size() << " reference=" << ref.size();
                report.mismatches.push_back({{n, code, mask}, os.str()});
            }
        }
        if (is_sampled)
            sampled.fetch_add(1, std::memory_order_relaxed);
        else
            cases.fetch_add(1, std::memory_order_relaxed);
    };

    for (std::uint32_t n = 1; n <= max_n; ++n) {
        const std::uint32_t pairs = n * (n - 1) / 2;
        const std::uint64_t graph_total = 1ull << pairs;
        const unsigned workers = resolve_thread_count(threads, graph_total);
        std::atomic<std::uint64_t> next{0};
        auto worker = [&]() {
            std::mt19937_64 rule_rng(child_seed(0xE4'0'5EEDull, n));
            for (;;) {
                const std::uint64_t code = next.fetch_add(1, std::memory_order_relaxed);
                if (code >= graph_total) break;
                const auto g = graph_from_code(n, code);
                for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                    check_case(n, code, g, mask, majority, false);
                    // Non-majority families: one seeded random rule per
                    // (graph, mask) keeps the sweep cheap but broad.
                    const auto& extra =
                        sampled_rules[bounded_u64(rule_rng, sampled_rules.size())];
                    check_case(n, code, g, mask, extra, true);
                }
            }
        };
        if (workers <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
    }
    report.cases_checked = cases.load();
    report.sampled_rule_cases = sampled.load();
    return report;
}

}  // namespace perco::oracle
