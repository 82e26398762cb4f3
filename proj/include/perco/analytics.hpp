#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace perco {

// Parameter bundle for the closed-form functions. c == n*p always; build
// through one of the factories so the identity cannot drift.
struct AnalyticParams {
    std::uint64_t n = 0;
    double p = 0.0;
    double c = 0.0;      // n * p
    double theta = 0.0;  // initial active fraction
    double alpha = 0.5;

    static AnalyticParams from_np(std::uint64_t n, double p, double theta = 0.0,
                                  double alpha = 0.5);
    static AnalyticParams from_nc(std::uint64_t n, double c, double theta = 0.0,
                                  double alpha = 0.5);
};

// P{ Bin(t,p) >= max(Bin(n-1-t,p), 1) } with the two binomials independent.
// Upper envelope of the per-vertex activation probability after t
// exploration steps; exact convolution, absolute accuracy <= 1e-12.
double pi_plus_exact(std::uint64_t n, std::uint64_t t, double p);

// Poissonised evaluation of the same quantity:
//   e^{-(n-1)p} sum_{k=1..t} (pt)^k/k! sum_{j=0..k} ((n-t-1)p)^j/j!
// The outer sum is truncated once the remaining tail is provably below
// 1e-14 of the accumulated value.
double pi_plus_poisson(std::uint64_t n, std::uint64_t t, double p);

// Crude first-mark bound: pi_plus(t) <= P{Bin(t,p) > 0} = 1-(1-p)^t.
double pi_upper_first_mark(std::uint64_t n, std::uint64_t t, double p);

// g(c) = (1+c) c e^{-c}; per-explored-vertex spread rate in the p = c/n
// regime. Maximum (1+golden ratio form) stays below 0.84.
double g_of_c(double c);

// A0 / (1 - g(c)): upper bound on the final active count when the initial
// set is sublinear and p = c/n.
double subcritical_bound(double a0, double c);

enum class FSeriesVariant {
    FiniteN,  // e^p prefactor, outer sum truncated at floor(x*n)
    Limit     // n -> infinity: prefactor 1, outer sum unbounded
};

// f_{c,theta}(x) = theta - x
//   + (1-theta) e^p e^{-c} sum_{k=1..floor(xn)} (cx)^k/k! sum_{j=0..k} ((1-x)c)^j/j!
// Scaled drift of the dominating process at time t = x*n; its first
// sign change bounds the final active fraction.
double f_c_theta(double x, const AnalyticParams& params,
                 FSeriesVariant variant = FSeriesVariant::FiniteN);

struct RootResult {
    std::optional<double> x0;          // smallest sign-change root >= theta
    double bracket_lo = 0.0;           // f(bracket_lo) >= 0
    double bracket_hi = 0.0;           // f(bracket_hi) < 0 when sign_change
    bool sign_change = false;
    bool double_root_suspected = false;
};

inline constexpr double kDefaultGridStep = 1e-3;
inline constexpr double kDefaultRootTol = 1e-9;

// Scans x in [theta, 1] for the first sign change of f_{c,theta} and
// refines it by bisection to width <= tol. A touch of zero without a sign
// change (at grid resolution) is flagged as a suspected double root and
// reported, not resolved. Throws if f(theta) < 0, which valid parameters
// cannot produce.
RootResult find_x0(const AnalyticParams& params,
                   double grid_step = kDefaultGridStep,
                   double tol = kDefaultRootTol,
                   FSeriesVariant variant = FSeriesVariant::FiniteN);

// Binomial upper/lower large-deviation bounds, clamped to <= 1:
//   P{X >= EX + z} <= exp(-z^2 / (2(EX + z/3)))
//   P{X <= EX - z} <= exp(-z^2 / (2 EX))
double chernoff_upper(double mean, double z);
double chernoff_lower(double mean, double z);

// delta(t) <= 2 exp(-(n/2 - t)^2 p / n), valid for t > n/2 (throws
// otherwise); clamped to <= 1.
double delta_upper_bound(std::uint64_t n, double p, double t);

// E[R(A0)] <= 2 n exp(-omega^2 / 2) with omega = (A0 - n/2) / sqrt(n/p);
// clamped to <= n.
double expected_r_bound(std::uint64_t n, double p, double a0);

// Supercritical margin omega = (A0 - n/2) / sqrt(n/p).
double supercritical_margin(std::uint64_t n, double p, double a0);

enum class RegimeTag {
    SparseSubcritical,
    CriticalWindow,
    DenseSubcritical,
    DenseSupercritical
};

struct RegimeThresholds {
    double sparse_c = 0.01;  // c at or below this: treat as p = o(1/n)
    double dense_c = 20.0;   // c at or above this: treat as p >> 1/n
    double small_theta = 0.01;  // below this the initial set counts as sublinear
};

struct RegimeReport {
    RegimeTag tag;
    std::string tag_name;
    std::string prediction;
    double bound = 0.0;   // regime-specific numeric bound on A*
    double margin = 0.0;  // supercritical margin (dense regimes)
};

RegimeReport classify_regime(const AnalyticParams& params, double a0,
                             const RegimeThresholds& thresholds = {});

const char* regime_tag_name(RegimeTag tag);

namespace detail {
// sum_{k=1..kmax} PoisPmf(lambda,k) * PoisCdf(mu,k), truncated when the
// remaining tail is provably < 1e-14 of the accumulated value. Stable for
// any lambda, mu (no e^{+large} intermediates).
double poisson_majority_sum(double lambda, double mu, std::uint64_t kmax);

// Binomial pmf over 0..n by multiplicative recurrence from the mode.
std::vector<double> binomial_pmf(std::uint64_t n, double p);
}  // namespace detail

}  // namespace perco
