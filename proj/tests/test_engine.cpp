#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "perco/engine.hpp"
#include "perco/graph.hpp"
#include "perco/oracle.hpp"
#include "perco/rng.hpp"

using namespace perco;

namespace {

GraphSample star_k14() {
    // center 0, leaves 1..4
    return graph_from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
}

GraphSample path3() { return graph_from_edges(3, {{0, 1}, {1, 2}}); }

std::vector<Vertex> all_vertices(std::uint32_t n) {
    std::vector<Vertex> v(n);
    for (Vertex i = 0; i < n; ++i) v[i] = i;
    return v;
}

}  // namespace

TEST_CASE("threshold_marks across the rule families") {
    const auto maj = ActivationRule::majority();
    CHECK(threshold_marks(maj, 0) == 1);  // isolated vertices can never activate
    CHECK(threshold_marks(maj, 1) == 1);
    CHECK(threshold_marks(maj, 2) == 1);
    CHECK(threshold_marks(maj, 3) == 2);
    CHECK(threshold_marks(maj, 4) == 2);
    CHECK(threshold_marks(maj, 5) == 3);

    const auto strict = ActivationRule::majority(true);
    CHECK(threshold_marks(strict, 0) == 1);
    CHECK(threshold_marks(strict, 1) == 1);
    CHECK(threshold_marks(strict, 2) == 2);
    CHECK(threshold_marks(strict, 4) == 3);

    // Proportional(1/2) non-strict must agree with Majority everywhere.
    const auto half = ActivationRule::proportional(0.5);
    for (std::uint64_t deg = 0; deg <= 200; ++deg)
        CHECK(threshold_marks(half, deg) == threshold_marks(maj, deg));
    const auto half_strict = ActivationRule::proportional(0.5, true);
    for (std::uint64_t deg = 0; deg <= 200; ++deg)
        CHECK(threshold_marks(half_strict, deg) == threshold_marks(strict, deg));

    // Exact tie handling: alpha*deg integral.
    CHECK(threshold_marks(ActivationRule::proportional(0.25), 8) == 2);
    CHECK(threshold_marks(ActivationRule::proportional(0.25, true), 8) == 3);
    // 0.3 as a double is slightly below 3/10, so 0.3*10 < 3.
    CHECK(threshold_marks(ActivationRule::proportional(0.3), 10) == 3);
    // 2/3 as a double is slightly below the rational 2/3.
    CHECK(threshold_marks(ActivationRule::proportional(2.0 / 3.0), 3) == 2);

    const auto cls = ActivationRule::classical(2);
    CHECK(threshold_marks(cls, 0) == 2);  // degree ignored
    CHECK(threshold_marks(cls, 100) == 2);
}

TEST_CASE("star graph: one leaf cannot move the center") {
    const auto g = star_k14();
    const std::vector<Vertex> init = {1};
    const auto t = run_percolation(g, init, ActivationRule::majority());
    CHECK(t.a_star == 1);
    CHECK(t.stopping_time == 1);
    CHECK(t.final_set == init);
}

TEST_CASE("path graph percolates from one end") {
    const auto g = path3();
    const std::vector<Vertex> init = {0};
    const auto t = run_percolation(g, init, ActivationRule::majority());
    CHECK(t.a_star == 3);
    CHECK(t.stopping_time == 3);
    CHECK(t.final_set == all_vertices(3));
    CHECK(t.a_series == std::vector<std::uint32_t>{1, 2, 3, 3});
}

TEST_CASE("degenerate initial sets") {
    const auto g = sample_gnp(40, 0.1, 5);
    const auto everyone = all_vertices(40);
    const auto full = run_percolation(g, everyone, ActivationRule::majority());
    CHECK(full.a_star == 40);
    CHECK(full.stopping_time == 40);

    const auto empty = run_percolation(g, std::vector<Vertex>{}, ActivationRule::majority());
    CHECK(empty.a_star == 0);
    CHECK(empty.stopping_time == 0);
    CHECK(empty.final_set.empty());
}

TEST_CASE("strict majority needs a clear majority at even degree") {
    const auto g = path3();  // middle vertex has degree 2
    const std::vector<Vertex> init = {0};
    const auto non_strict = run_percolation(g, init, ActivationRule::majority(false));
    CHECK(non_strict.a_star == 3);
    const auto strict = run_percolation(g, init, ActivationRule::majority(true));
    CHECK(strict.a_star == 1);
}

TEST_CASE("classical rule ignores degree") {
    const auto g = star_k14();
    const std::vector<Vertex> init = {0};  // center active
    const auto r1 = run_percolation(g, init, ActivationRule::classical(1));
    CHECK(r1.a_star == 5);  // every leaf receives one mark
    const auto r2 = run_percolation(g, init, ActivationRule::classical(2));
    CHECK(r2.a_star == 1);  // leaves have only one neighbour
}

TEST_CASE("fixed point matches the worked examples") {
    SUBCASE("star") {
        const auto g = star_k14();
        const auto fp = final_active_fixed_point(g, std::vector<Vertex>{1},
                                                 ActivationRule::majority());
        CHECK(fp.final_set == std::vector<Vertex>{1});
        CHECK(fp.generation[1] == 0);
        CHECK(fp.generation[0] == -1);
    }
    SUBCASE("path with generation indices") {
        const auto g = path3();
        const auto fp = final_active_fixed_point(g, std::vector<Vertex>{0},
                                                 ActivationRule::majority());
        CHECK(fp.final_set == all_vertices(3));
        CHECK(fp.generation[0] == 0);
        CHECK(fp.generation[1] == 1);
        CHECK(fp.generation[2] == 2);
    }
    SUBCASE("complete graph, two seeds take everything") {
        const auto g = sample_gnp(4, 1.0, 0);
        const auto fp = final_active_fixed_point(g, std::vector<Vertex>{0, 1},
                                                 ActivationRule::majority());
        CHECK(fp.final_set == all_vertices(4));
        CHECK(fp.generation[2] == 1);
        CHECK(fp.generation[3] == 1);
    }
}

TEST_CASE("trajectory identities on random instances") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const std::uint32_t n = 2 + static_cast<std::uint32_t>(bounded_u64(rng, 80));
        const double p = canonical_unit(rng) * 0.2;
        const auto g = sample_gnp(n, p, rng());
        const auto a0 = bounded_u64(rng, n + 1);
        const auto init = draw_initial(InitialSpec::fixed_size(a0, rng()), n);
        const auto t = run_percolation(g, init, ActivationRule::majority());

        CHECK(t.a_series.size() == t.stopping_time + 1);
        CHECK(t.a_series.back() == t.stopping_time);   // A(T) = T
        CHECK(t.a_star == t.stopping_time);            // A* = T
        CHECK(t.final_set.size() == t.a_star);
        for (std::size_t s = 0; s < t.stopping_time; ++s) {
            CHECK(t.a_series[s] > s);                  // A(t) > t before T
            CHECK(t.a_series[s + 1] >= t.a_series[s]); // monotone growth
        }
    }
}

TEST_CASE("isolated vertices stay inactive unless seeded") {
    auto g = graph_from_edges(5, {{0, 1}, {1, 2}});  // 3, 4 isolated
    const auto t = run_percolation(g, std::vector<Vertex>{0}, ActivationRule::majority());
    CHECK(!std::binary_search(t.final_set.begin(), t.final_set.end(), Vertex{3}));
    CHECK(!std::binary_search(t.final_set.begin(), t.final_set.end(), Vertex{4}));
    const auto seeded = run_percolation(g, std::vector<Vertex>{0, 3}, ActivationRule::majority());
    CHECK(std::binary_search(seeded.final_set.begin(), seeded.final_set.end(), Vertex{3}));
}

TEST_CASE("exploration order does not change the final set") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 100; ++rep) {
        const std::uint32_t n = 2 + static_cast<std::uint32_t>(bounded_u64(rng, 60));
        const auto g = sample_gnp(n, canonical_unit(rng) * 0.2, rng());
        const auto init = draw_initial(InitialSpec::fixed_size(bounded_u64(rng, n + 1), rng()), n);
        const auto fifo = run_percolation(g, init, ActivationRule::majority());
        for (int o = 0; o < 10; ++o) {
            const auto shuffled = run_with_order(g, init, ActivationRule::majority(), rng());
            CHECK(shuffled.final_set == fifo.final_set);
            CHECK(shuffled.a_star == fifo.a_star);
        }
    }
}

TEST_CASE("larger seed sets can only grow the outcome") {
    std::mt19937_64 rng(31337);
    for (int rep = 0; rep < 200; ++rep) {
        const std::uint32_t n = 3 + static_cast<std::uint32_t>(bounded_u64(rng, 60));
        const auto g = sample_gnp(n, canonical_unit(rng) * 0.25, rng());
        auto small = draw_initial(InitialSpec::fixed_size(bounded_u64(rng, n), rng()), n);
        std::set<Vertex> bigger(small.begin(), small.end());
        const auto extra = bounded_u64(rng, n + 1 - small.size());
        std::mt19937_64 pick(rng());
        while (bigger.size() < small.size() + extra)
            bigger.insert(static_cast<Vertex>(bounded_u64(pick, n)));
        const std::vector<Vertex> big(bigger.begin(), bigger.end());

        const auto fa = run_percolation(g, small, ActivationRule::majority()).final_set;
        const auto fb = run_percolation(g, big, ActivationRule::majority()).final_set;
        CHECK(std::includes(fb.begin(), fb.end(), fa.begin(), fa.end()));
    }
}

TEST_CASE("engine agrees with both references on random instances, all rule families") {
    std::mt19937_64 rng(909);
    std::vector<ActivationRule> rules = {
        ActivationRule::majority(),        ActivationRule::majority(true),
        ActivationRule::proportional(0.3), ActivationRule::proportional(0.5),
        ActivationRule::proportional(0.7), ActivationRule::classical(1),
        ActivationRule::classical(2),      ActivationRule::classical(3)};
    for (int rep = 0; rep < 10000; ++rep) {
        const std::uint32_t n = 2 + static_cast<std::uint32_t>(bounded_u64(rng, 49));
        const auto g = sample_gnp(n, canonical_unit(rng) * 0.4, rng());
        const auto init = draw_initial(InitialSpec::fixed_size(bounded_u64(rng, n + 1), rng()), n);
        const auto& rule = rules[bounded_u64(rng, rules.size())];
        const auto eng = run_percolation(g, init, rule).final_set;
        const auto fp = final_active_fixed_point(g, init, rule).final_set;
        const auto ref = oracle::mc_reference_percolation(g, init, rule);
        REQUIRE(eng == ref);
        REQUIRE(fp == ref);
    }
}

TEST_CASE("initial set drawing") {
    SUBCASE("fixed size draws exactly a0 distinct sorted vertices") {
        for (std::uint64_t a0 : {0ull, 1ull, 7ull, 50ull}) {
            const auto s = draw_initial(InitialSpec::fixed_size(a0, 99), 50);
            CHECK(s.size() == a0);
            CHECK(std::is_sorted(s.begin(), s.end()));
            CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
        }
        CHECK_THROWS_AS(draw_initial(InitialSpec::fixed_size(51, 1), 50),
                        std::invalid_argument);
    }
    SUBCASE("bernoulli mode is deterministic per seed and roughly calibrated") {
        const auto a = draw_initial(InitialSpec::bernoulli(0.3, 4), 20000);
        const auto b = draw_initial(InitialSpec::bernoulli(0.3, 4), 20000);
        CHECK(a == b);
        // 5 sigma window around the binomial mean
        CHECK(std::abs(static_cast<double>(a.size()) - 6000.0) <=
              5.0 * std::sqrt(20000 * 0.3 * 0.7));
    }
}
