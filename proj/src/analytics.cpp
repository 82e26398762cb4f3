#include "perco/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "perco/config.hpp"

namespace perco {

namespace detail {

std::vector<double> binomial_pmf(std::uint64_t n, double p) {
    std::vector<double> pmf(n + 1, 0.0);
    if (p <= 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (p >= 1.0) {
        pmf[n] = 1.0;
        return pmf;
    }
    const auto mode = static_cast<std::uint64_t>(
        std::min<double>(static_cast<double>(n), std::floor((static_cast<double>(n) + 1) * p)));
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(mode);
    const double log_mode = std::lgamma(nd + 1) - std::lgamma(md + 1) - std::lgamma(nd - md + 1) +
                            md * log_p + (nd - md) * log_q;
    pmf[mode] = std::exp(log_mode);
    const double ratio = p / (1.0 - p);
    for (std::uint64_t k = mode; k < n; ++k) {
        pmf[k + 1] = pmf[k] * ratio * (static_cast<double>(n - k) / static_cast<double>(k + 1));
        if (pmf[k + 1] == 0.0) break;
    }
    for (std::uint64_t k = mode; k > 0; --k) {
        pmf[k - 1] = pmf[k] / ratio * (static_cast<double>(k) / static_cast<double>(n - k + 1));
        if (pmf[k - 1] == 0.0) break;
    }
    return pmf;
}

double poisson_majority_sum(double lambda, double mu, std::uint64_t kmax) {
    if (lambda <= 0.0 || kmax == 0) return 0.0;
    // Terms are PoisPmf(lambda,k) * PoisCdf(mu,k); the prefactor
    // e^{-(lambda+mu)} of the published double sum is absorbed, which keeps
    // every intermediate inside [0,1].
    const double relative_tail = 1e-14;

    // Ascending Poisson pmf streams. Mass below mean-40*sqrt(mean) is under
    // 1e-300 and is skipped by starting at k0 with an lgamma-anchored value.
    struct PoissonStream {
        double rate;
        std::uint64_t k = 0;
        double pmf = 0.0;
        explicit PoissonStream(double r) : rate(r) {
            // e^{-rate} underflows near rate ~ 708; start 35 sigma below the
            // mode instead (mass below that is < 1e-260 and dropped).
            double start = 0.0;
            if (rate > 600.0) start = std::floor(rate - 35.0 * std::sqrt(rate));
            if (start < 0.0) start = 0.0;
            k = static_cast<std::uint64_t>(start);
            if (k == 0)
                pmf = std::exp(-rate);
            else
                pmf = std::exp(static_cast<double>(k) * std::log(rate) - rate -
                               std::lgamma(static_cast<double>(k) + 1));
        }
        void advance() {  // move to k+1
            ++k;
            pmf *= rate / static_cast<double>(k);
        }
        double pmf_at(std::uint64_t target) {  // target >= k
            while (k < target) advance();
            return pmf;
        }
    };

    PoissonStream ps_lambda(lambda);
    PoissonStream ps_mu(mu >= 0.0 ? mu : 0.0);
    double cdf_mu = 0.0;
    std::uint64_t cdf_upto = 0;
    if (mu <= 0.0) {
        cdf_mu = 1.0;
    } else {
        cdf_mu = ps_mu.pmf;  // mass below the stream start is negligible
        cdf_upto = ps_mu.k;
    }
    auto cdf_mu_at = [&](std::uint64_t target) {
        if (mu <= 0.0) return 1.0;
        while (cdf_upto < target) {
            ps_mu.advance();
            ++cdf_upto;
            cdf_mu += ps_mu.pmf;
        }
        return std::min(cdf_mu, 1.0);
    };

    double acc = 0.0;
    double compensation = 0.0;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        const double pk = ps_lambda.pmf_at(k);
        const double term = pk * cdf_mu_at(k);
        // Kahan accumulation
        const double y = term - compensation;
        const double t = acc + y;
        compensation = (t - acc) - y;
        acc = t;
        if (static_cast<double>(k) > lambda) {
            const double q = lambda / static_cast<double>(k + 1);
            if (q < 1.0) {
                const double tail = pk * q / (1.0 - q);  // >= remaining pmf mass, cdf <= 1
                if (tail <= relative_tail * acc || (acc == 0.0 && tail < 1e-300)) break;
            }
        }
    }
    return std::min(acc, 1.0);
}

}  // namespace detail

AnalyticParams AnalyticParams::from_np(std::uint64_t n, double p, double theta, double alpha) {
    if (n == 0) throw std::invalid_argument("AnalyticParams: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("AnalyticParams: p must lie in [0,1]");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("AnalyticParams: theta must lie in [0,1]");
    AnalyticParams a;
    a.n = n;
    a.p = p;
    a.c = p * static_cast<double>(n);
    a.theta = theta;
    a.alpha = alpha;
    return a;
}

AnalyticParams AnalyticParams::from_nc(std::uint64_t n, double c, double theta, double alpha) {
    if (n == 0) throw std::invalid_argument("AnalyticParams: n must be >= 1");
    if (!(c >= 0.0)) throw std::invalid_argument("AnalyticParams: c must be >= 0");
    AnalyticParams a = from_np(n, c / static_cast<double>(n), theta, alpha);
    a.c = c;  // keep the given c exactly
    return a;
}

double pi_plus_exact(std::uint64_t n, std::uint64_t t, double p) {
    if (n == 0) throw std::invalid_argument("pi_plus_exact: n must be >= 1");
    if (t >= n) throw std::invalid_argument("pi_plus_exact: t must satisfy t <= n-1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("pi_plus_exact: p must lie in [0,1]");
    if (t == 0 || p == 0.0) return 0.0;

    const auto pmf_x = detail::binomial_pmf(t, p);
    const auto pmf_y = detail::binomial_pmf(n - 1 - t, p);

    // survival[k] = P{X >= k}; suffix sums run smallest-terms-first.
    std::vector<double> survival(t + 2, 0.0);
    for (std::uint64_t k = t + 1; k-- > 0;)
        survival[k] = survival[k + 1] + pmf_x[k];

    std::vector<double> terms;
    terms.reserve(pmf_y.size());
    for (std::uint64_t y = 0; y < pmf_y.size(); ++y) {
        const std::uint64_t need = std::max<std::uint64_t>(y, 1);
        const double s = need <= t ? survival[need] : 0.0;
        terms.push_back(pmf_y[y] * s);
    }
    std::sort(terms.begin(), terms.end());
    double acc = 0.0, comp = 0.0;
    for (double term : terms) {
        const double yv = term - comp;
        const double tv = acc + yv;
        comp = (tv - acc) - yv;
        acc = tv;
    }
    return std::clamp(acc, 0.0, 1.0);
}

double pi_plus_poisson(std::uint64_t n, std::uint64_t t, double p) {
    if (n == 0) throw std::invalid_argument("pi_plus_poisson: n must be >= 1");
    if (t >= n) throw std::invalid_argument("pi_plus_poisson: t must satisfy t <= n-1");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("pi_plus_poisson: p must lie in [0,1]");
    const double lambda = p * static_cast<double>(t);
    const double mu = p * static_cast<double>(n - 1 - t);
    return detail::poisson_majority_sum(lambda, mu, t);
}

double pi_upper_first_mark(std::uint64_t /*n*/, std::uint64_t t, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("pi_upper_first_mark: p must lie in [0,1]");
    if (t == 0 || p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    return -std::expm1(static_cast<double>(t) * std::log1p(-p));
}

double g_of_c(double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("g_of_c: c must be >= 0");
    return (1.0 + c) * c * std::exp(-c);
}

double subcritical_bound(double a0, double c) {
    if (a0 < 0.0) throw std::invalid_argument("subcritical_bound: a0 must be >= 0");
    return a0 / (1.0 - g_of_c(c));
}

double f_c_theta(double x, const AnalyticParams& params, FSeriesVariant variant) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("f_c_theta: x must lie in [0,1]");
    if (params.n == 0) throw std::invalid_argument("f_c_theta: n must be >= 1");
    const double theta = params.theta;
    const double c = params.c;
    std::uint64_t kmax;
    double prefactor;
    if (variant == FSeriesVariant::FiniteN) {
        kmax = static_cast<std::uint64_t>(std::floor(x * static_cast<double>(params.n)));
        prefactor = std::exp(params.p);
    } else {
        kmax = std::numeric_limits<std::uint64_t>::max();
        prefactor = 1.0;
    }
    const double series = detail::poisson_majority_sum(c * x, c * (1.0 - x), kmax);
    return theta - x + (1.0 - theta) * prefactor * series;
}

RootResult find_x0(const AnalyticParams& params, double grid_step, double tol,
                   FSeriesVariant variant) {
    if (!(grid_step > 0.0 && grid_step <= 0.01))
        throw std::invalid_argument("find_x0: grid_step must lie in (0, 0.01]");
    if (!(tol > 0.0 && tol < grid_step))
        throw std::invalid_argument("find_x0: tol must lie in (0, grid_step)");
    const double theta = params.theta;
    auto f = [&](double x) { return f_c_theta(x, params, variant); };

    double prev_x = theta;
    double prev_f = f(theta);
    if (prev_f < 0.0)
        throw NumericalError("find_x0: f(theta) < 0, inconsistent parameters");

    RootResult res;
    double min_f = prev_f;
    double min_x = theta;
    for (double x = theta + grid_step; x < 1.0 + grid_step / 2; x += grid_step) {
        const double xe = std::min(x, 1.0);
        const double fx = f(xe);
        if (prev_f >= 0.0 && fx < 0.0) {
            double lo = prev_x, hi = xe;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                if (f(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            res.x0 = 0.5 * (lo + hi);
            res.bracket_lo = lo;
            res.bracket_hi = hi;
            res.sign_change = true;
            return res;
        }
        if (fx < min_f) {
            min_f = fx;
            min_x = xe;
        }
        prev_x = xe;
        prev_f = fx;
        if (xe >= 1.0) break;
    }

    // No sign change. A touch of zero at grid resolution (f dips to
    // O(grid_step^2) without crossing) is flagged as a suspected double root.
    if (min_f <= 50.0 * grid_step * grid_step) {
        res.x0 = min_x;
        res.bracket_lo = std::max(theta, min_x - grid_step);
        res.bracket_hi = std::min(1.0, min_x + grid_step);
        res.double_root_suspected = true;
    }
    return res;
}

double chernoff_upper(double mean, double z) {
    if (mean < 0.0 || z < 0.0)
        throw std::invalid_argument("chernoff_upper: mean and z must be >= 0");
    if (z == 0.0) return 1.0;
    const double denom = 2.0 * (mean + z / 3.0);
    return std::min(1.0, std::exp(-(z * z) / denom));
}

double chernoff_lower(double mean, double z) {
    if (mean < 0.0 || z < 0.0)
        throw std::invalid_argument("chernoff_lower: mean and z must be >= 0");
    if (z == 0.0) return 1.0;
    if (mean == 0.0) return 0.0;
    return std::min(1.0, std::exp(-(z * z) / (2.0 * mean)));
}

double delta_upper_bound(std::uint64_t n, double p, double t) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("delta_upper_bound: p must lie in (0,1]");
    const double half_n = static_cast<double>(n) / 2.0;
    if (!(t > half_n))
        throw std::invalid_argument("delta_upper_bound: requires t > n/2");
    const double d = t - half_n;
    return std::min(1.0, 2.0 * std::exp(-d * d * p / static_cast<double>(n)));
}

double supercritical_margin(std::uint64_t n, double p, double a0) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("supercritical_margin: p must lie in (0,1]");
    const double half_n = static_cast<double>(n) / 2.0;
    return (a0 - half_n) / std::sqrt(static_cast<double>(n) / p);
}

double expected_r_bound(std::uint64_t n, double p, double a0) {
    const double omega = supercritical_margin(n, p, a0);
    const double nd = static_cast<double>(n);
    return std::min(nd, 2.0 * nd * std::exp(-omega * omega / 2.0));
}

const char* regime_tag_name(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::SparseSubcritical: return "SPARSE_SUBCRITICAL";
        case RegimeTag::CriticalWindow: return "CRITICAL_WINDOW";
        case RegimeTag::DenseSubcritical: return "DENSE_SUBCRITICAL";
        case RegimeTag::DenseSupercritical: return "DENSE_SUPERCRITICAL";
    }
    return "?";
}

RegimeReport classify_regime(const AnalyticParams& params, double a0,
                             const RegimeThresholds& th) {
    if (a0 < 0.0 || a0 > static_cast<double>(params.n))
        throw std::invalid_argument("classify_regime: a0 must lie in [0,n]");
    RegimeReport rep;
    const double nd = static_cast<double>(params.n);
    const double theta = a0 / nd;
    const double c = params.c;

    if (c <= th.sparse_c) {
        rep.tag = RegimeTag::SparseSubcritical;
        rep.prediction = "A* ~= A0 (no significant spread)";
        rep.bound = subcritical_bound(a0, c);
    } else if (c < th.dense_c) {
        rep.tag = RegimeTag::CriticalWindow;
        if (theta < th.small_theta) {
            rep.prediction = "A* = o(n), at most A0/(1-g(c))";
            rep.bound = subcritical_bound(a0, c);
        } else {
            AnalyticParams q = params;
            q.theta = theta;
            const auto root = find_x0(q);
            const double x0 = root.x0.value_or(1.0);
            rep.prediction = "A* = theta*·n with theta < theta* <= x0 < 1";
            rep.bound = x0 * nd;
        }
    } else {
        rep.margin = supercritical_margin(params.n, params.p, a0);
        if (rep.margin > 0.0) {
            rep.tag = RegimeTag::DenseSupercritical;
            rep.prediction = "A* = n - o(n) (almost percolation)";
            rep.bound = nd;
        } else {
            rep.tag = RegimeTag::DenseSubcritical;
            rep.prediction = "A* ~= A0 (high degrees stabilise the graph)";
            rep.bound = a0;
        }
    }
    rep.tag_name = regime_tag_name(rep.tag);
    return rep;
}

}  // namespace perco
