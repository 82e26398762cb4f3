#include <doctest.h>

#include <cmath>
#include <random>

#include "perco/analytics.hpp"
#include "perco/config.hpp"
#include "perco/oracle.hpp"

using namespace perco;

TEST_CASE("pi_plus_exact worked values and edge cases") {
    // 4-outcome x 3-outcome case by hand: P{X=1}*P{Y<=1} = 0.5 * 0.75
    CHECK(pi_plus_exact(4, 1, 0.5) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(pi_plus_exact(50, 0, 0.3) == 0.0);
    CHECK(pi_plus_exact(50, 10, 0.0) == 0.0);
    CHECK(pi_plus_exact(7, 6, 1.0) == 1.0);
    CHECK_THROWS_AS(pi_plus_exact(10, 10, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(pi_plus_exact(10, 3, 1.5), std::invalid_argument);
}

TEST_CASE("pi_plus_exact matches full enumeration on the small grid") {
    double max_diff = 0.0;
    for (std::uint32_t n = 2; n <= 20; ++n)
        for (std::uint32_t t = 0; t < n; ++t)
            for (int pi = 1; pi <= 9; ++pi) {
                const double p = pi / 10.0;
                const double a = pi_plus_exact(n, t, p);
                const double b = oracle::exact_pi_plus_enumeration(n, t, p);
                max_diff = std::max(max_diff, std::abs(a - b));
            }
    CHECK(max_diff <= 1e-12);
}

TEST_CASE("pi_plus_exact is nondecreasing in t and below the first-mark bound") {
    for (std::uint64_t n : {30ull, 500ull}) {
        for (double p : {0.001, 0.02, 0.2}) {
            double prev = 0.0;
            for (std::uint64_t t = 0; t < n; t += (n > 100 ? 13 : 1)) {
                const double v = pi_plus_exact(n, t, p);
                CHECK(v >= prev - 1e-12);
                CHECK(v <= pi_upper_first_mark(n, t, p) + 1e-12);
                prev = v;
            }
        }
    }
}

TEST_CASE("pi_plus_poisson stays within the O(p) envelope of the exact value") {
    CHECK(pi_plus_poisson(100, 0, 0.01) == 0.0);
    // worked comparison points
    CHECK(std::abs(pi_plus_poisson(1000, 300, 0.002) - pi_plus_exact(1000, 300, 0.002)) <=
          10.0 * 0.002);
    CHECK(std::abs(pi_plus_poisson(10000, 3000, 2e-4) - pi_plus_exact(10000, 3000, 2e-4)) <=
          10.0 * 2e-4);
    // grid with c = n p <= 5
    for (std::uint64_t n : {50ull, 200ull, 1000ull, 10000ull}) {
        for (double c : {0.5, 1.0, 2.0, 5.0}) {
            const double p = c / static_cast<double>(n);
            for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
                const auto t = static_cast<std::uint64_t>(frac * static_cast<double>(n));
                const double diff = std::abs(pi_plus_poisson(n, t, p) - pi_plus_exact(n, t, p));
                CHECK(diff <= 10.0 * p);
            }
        }
    }
}

TEST_CASE("pi_upper_first_mark") {
    CHECK(pi_upper_first_mark(10, 0, 0.3) == 0.0);
    CHECK(pi_upper_first_mark(10, 5, 1.0) == 1.0);
    CHECK(pi_upper_first_mark(1000, 100, 1e-3) ==
          doctest::Approx(1.0 - std::pow(0.999, 100)).epsilon(1e-12));
    // cross-check against pmf summation
    const auto pmf = detail::binomial_pmf(100, 1e-3);
    double tail = 0.0;
    for (std::size_t k = 1; k < pmf.size(); ++k) tail += pmf[k];
    CHECK(pi_upper_first_mark(1000, 100, 1e-3) == doctest::Approx(tail).epsilon(1e-12));
}

TEST_CASE("g(c) values and maximum") {
    CHECK(g_of_c(0.0) == 0.0);
    CHECK(g_of_c(1.0) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-15));
    double best = 0.0, best_c = 0.0;
    for (double c = 0.0; c <= 10.0; c += 1e-4) {
        const double v = g_of_c(c);
        if (v > best) {
            best = v;
            best_c = c;
        }
    }
    CHECK(best < 0.84);
    CHECK(std::abs(best_c - (1.0 + std::sqrt(5.0)) / 2.0) <= 1e-3);
}

TEST_CASE("subcritical_bound") {
    CHECK(subcritical_bound(100, 1.0) ==
          doctest::Approx(100.0 / (1.0 - 2.0 / std::exp(1.0))).epsilon(1e-12));
    CHECK(subcritical_bound(0, 2.0) == 0.0);
    CHECK(subcritical_bound(50, 1e-12) == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("f_{c,theta} anchors") {
    const auto params = AnalyticParams::from_nc(10000, 2.0, 0.3);
    CHECK(f_c_theta(0.0, params) == 0.3);  // exact: empty sum
    CHECK(f_c_theta(1.0, params) < 0.0);
    CHECK(f_c_theta(0.3, params) > 0.0);  // positive drift at the start
    CHECK_THROWS_AS(f_c_theta(-0.1, params), std::invalid_argument);
    CHECK_THROWS_AS(f_c_theta(1.1, params), std::invalid_argument);

    // c -> 0 limit: f degenerates to theta - x
    const auto zero = AnalyticParams::from_nc(10000, 0.0, 0.3);
    CHECK(f_c_theta(0.7, zero) == doctest::Approx(0.3 - 0.7).epsilon(1e-14));

    // Limit variant drops the e^p factor
    const auto small = AnalyticParams::from_nc(100, 2.0, 0.3);
    const double finite = f_c_theta(0.5, small);
    const double limit = f_c_theta(0.5, small, FSeriesVariant::Limit);
    CHECK(finite > limit);  // e^{p} > 1
    CHECK(std::abs(finite - limit) < 0.05);
}

TEST_CASE("find_x0 brackets a sign change") {
    SUBCASE("c -> 0: root collapses to theta") {
        const auto params = AnalyticParams::from_nc(10000, 0.0, 0.3);
        const auto root = find_x0(params);
        REQUIRE(root.x0.has_value());
        CHECK(root.sign_change);
        CHECK(*root.x0 == doctest::Approx(0.3).epsilon(1e-6));
    }
    SUBCASE("c=2, theta=0.3 against an independent fine-grid scan") {
        const auto params = AnalyticParams::from_nc(10000, 2.0, 0.3);
        const auto root = find_x0(params);
        REQUIRE(root.x0.has_value());
        CHECK(root.sign_change);
        CHECK(*root.x0 >= 0.3);
        CHECK(*root.x0 < 1.0);
        // invariants of the returned bracket
        CHECK(f_c_theta(root.bracket_lo, params) >= 0.0);
        CHECK(f_c_theta(root.bracket_hi, params) < 0.0);
        CHECK(root.bracket_hi - root.bracket_lo <= 1e-9);

        // fine-grid oracle at step 1e-6
        double scan = -1.0;
        for (double x = 0.3; x <= 1.0; x += 1e-6) {
            if (f_c_theta(x, params) < 0.0) {
                scan = x;
                break;
            }
        }
        REQUIRE(scan > 0.0);
        CHECK(std::abs(*root.x0 - scan) <= 2e-6);
    }
    SUBCASE("x0 >= theta always") {
        for (double theta : {0.1, 0.4, 0.8}) {
            const auto params = AnalyticParams::from_nc(5000, 1.5, theta);
            const auto root = find_x0(params);
            if (root.x0) CHECK(*root.x0 >= theta - 1e-12);
        }
    }
    SUBCASE("parameter validation") {
        const auto params = AnalyticParams::from_nc(1000, 2.0, 0.3);
        CHECK_THROWS_AS(find_x0(params, 0.02, 1e-9), std::invalid_argument);
        CHECK_THROWS_AS(find_x0(params, 1e-3, 1e-2), std::invalid_argument);
    }
}

TEST_CASE("chernoff bounds") {
    CHECK(chernoff_upper(10.0, 0.0) == 1.0);
    CHECK(chernoff_lower(10.0, 0.0) == 1.0);
    CHECK(chernoff_lower(10.0, 10.0) == doctest::Approx(std::exp(-5.0)).epsilon(1e-12));

    double prev = 1.0;
    for (double z = 0.0; z <= 50.0; z += 0.5) {
        const double v = chernoff_upper(10.0, z);
        CHECK(v <= prev + 1e-15);
        CHECK(v <= 1.0);
        prev = v;
    }

    // Dominance over exact binomial tails via direct pmf summation.
    auto exact_upper = [](std::uint64_t n, double p, double z) {
        const auto pmf = detail::binomial_pmf(n, p);
        const double mean = static_cast<double>(n) * p;
        double s = 0.0;
        for (std::size_t k = pmf.size(); k-- > 0;)
            if (static_cast<double>(k) >= mean + z) s += pmf[k];
        return s;
    };
    auto exact_lower = [](std::uint64_t n, double p, double z) {
        const auto pmf = detail::binomial_pmf(n, p);
        const double mean = static_cast<double>(n) * p;
        double s = 0.0;
        for (std::size_t k = 0; k < pmf.size(); ++k)
            if (static_cast<double>(k) <= mean - z) s += pmf[k];
        return s;
    };
    CHECK(chernoff_upper(10.0, 10.0) >= exact_upper(1000, 0.01, 10.0));
    CHECK(chernoff_lower(10.0, 10.0) >= exact_lower(1000, 0.01, 10.0));
    for (double z : {1.0, 3.0, 7.0, 15.0}) {
        CHECK(chernoff_upper(50.0 * 0.2, z) >= exact_upper(50, 0.2, z));
        CHECK(chernoff_lower(50.0 * 0.2, z) >= exact_lower(50, 0.2, z));
    }
}

TEST_CASE("delta bound and supercritical companions") {
    // t = n/2 + omega*sqrt(n/p) makes the exponent exactly omega^2
    const std::uint64_t n = 10000;
    const double p = 0.04;
    const double omega = 2.0;
    const double t = n / 2.0 + omega * std::sqrt(n / p);
    CHECK(delta_upper_bound(n, p, t) == doctest::Approx(2.0 * std::exp(-4.0)).epsilon(1e-12));

    // worked example: bound exceeds 1 and is clamped
    CHECK(delta_upper_bound(10000, 0.02, 5500.0) == 1.0);

    CHECK_THROWS_AS(delta_upper_bound(100, 0.5, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(delta_upper_bound(100, 0.5, 20.0), std::invalid_argument);

    const double margin = supercritical_margin(20000, 0.01, 11000.0);
    CHECK(margin == doctest::Approx(1000.0 / std::sqrt(2e6)).epsilon(1e-12));
    CHECK(expected_r_bound(20000, 0.01, 11000.0) ==
          doctest::Approx(std::min(20000.0, 2.0 * 20000.0 * std::exp(-margin * margin / 2))));
}

TEST_CASE("regime classification") {
    SUBCASE("sparse") {
        const auto params = AnalyticParams::from_np(100000, 1e-7);
        const auto rep = classify_regime(params, 1000.0);
        CHECK(rep.tag == RegimeTag::SparseSubcritical);
        CHECK(rep.tag_name == "SPARSE_SUBCRITICAL");
        CHECK(rep.bound == doctest::Approx(subcritical_bound(1000.0, params.c)));
    }
    SUBCASE("critical window with linear seed") {
        const auto params = AnalyticParams::from_nc(10000, 2.0, 0.3);
        const auto rep = classify_regime(params, 3000.0);
        CHECK(rep.tag == RegimeTag::CriticalWindow);
        CHECK(rep.bound > 3000.0);
        CHECK(rep.bound < 10000.0);
    }
    SUBCASE("dense supercritical") {
        const auto params = AnalyticParams::from_nc(20000, 200.0, 0.55);
        const auto rep = classify_regime(params, 11000.0);
        CHECK(rep.tag == RegimeTag::DenseSupercritical);
        CHECK(rep.margin == doctest::Approx(supercritical_margin(20000, 0.01, 11000.0)));
    }
    SUBCASE("dense subcritical") {
        const auto params = AnalyticParams::from_nc(20000, 200.0, 0.4);
        const auto rep = classify_regime(params, 8000.0);
        CHECK(rep.tag == RegimeTag::DenseSubcritical);
    }
}

TEST_CASE("AnalyticParams keeps c = n p") {
    const auto a = AnalyticParams::from_np(1000, 0.002);
    CHECK(a.c == doctest::Approx(2.0).epsilon(1e-15));
    const auto b = AnalyticParams::from_nc(1000, 2.0);
    CHECK(b.p == doctest::Approx(0.002).epsilon(1e-15));
    CHECK(b.c == 2.0);
    CHECK_THROWS_AS(AnalyticParams::from_np(0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(AnalyticParams::from_np(10, 1.5), std::invalid_argument);
}
