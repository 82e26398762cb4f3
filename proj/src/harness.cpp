#include "perco/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "perco/config.hpp"
#include "perco/engine.hpp"
#include "perco/graph.hpp"
#include "perco/rng.hpp"

namespace perco {

using nlohmann::json;

unsigned resolve_thread_count(unsigned requested, std::uint64_t work_items) {
    unsigned t = requested;
    if (t == 0) {
        if (const char* env = std::getenv("PERCO_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) t = static_cast<unsigned>(v);
        }
    }
    if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
    if (work_items < t) t = static_cast<unsigned>(std::max<std::uint64_t>(work_items, 1));
    return t;
}

void ExperimentConfig::validate() const {
    if (n == 0) throw std::invalid_argument("config: n must be >= 1");
    if ((p < 0.0) == (c < 0.0))
        throw std::invalid_argument("config: exactly one of p, c must be given");
    const double pp = resolved_p();
    if (!(pp >= 0.0 && pp <= 1.0)) throw std::invalid_argument("config: p must lie in [0,1]");
    switch (init_mode) {
        case InitMode::A0:
            if (init_value < 0.0 || init_value > static_cast<double>(n))
                throw std::invalid_argument("config: a0 must lie in [0,n]");
            break;
        case InitMode::Theta:
            if (!(init_value >= 0.0 && init_value <= 1.0))
                throw std::invalid_argument("config: theta must lie in [0,1]");
            break;
        case InitMode::Q:
            if (!(init_value >= 0.0 && init_value <= 1.0))
                throw std::invalid_argument("config: q must lie in [0,1]");
            break;
    }
    if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
    if (!(almost_fraction > 0.0 && almost_fraction <= 1.0))
        throw std::invalid_argument("config: almost_fraction must lie in (0,1]");
    if (spread_epsilon < 0.0)
        throw std::invalid_argument("config: spread_epsilon must be >= 0");
    const std::uint64_t cells = static_cast<std::uint64_t>(n) * runs;
    if (cells > max_cells) {
        std::ostringstream os;
        os << "config: resource budget exceeded: n*runs = " << cells << " > max_cells = "
           << max_cells << " (raise max_cells to proceed)";
        throw std::invalid_argument(os.str());
    }
    if (sweep) {
        if (sweep->values.empty())
            throw std::invalid_argument("config: sweep.values must be non-empty");
        if (!std::is_sorted(sweep->values.begin(), sweep->values.end()))
            throw std::invalid_argument("config: sweep.values must be ascending");
    }
}

namespace {

InitialSpec make_init(const ExperimentConfig& cfg, std::uint64_t seed) {
    switch (cfg.init_mode) {
        case ExperimentConfig::InitMode::A0:
            return InitialSpec::fixed_size(static_cast<std::uint64_t>(std::llround(cfg.init_value)), seed);
        case ExperimentConfig::InitMode::Theta:
            return InitialSpec::fixed_size(
                static_cast<std::uint64_t>(std::llround(cfg.init_value * static_cast<double>(cfg.n))), seed);
        case ExperimentConfig::InitMode::Q:
            return InitialSpec::bernoulli(cfg.init_value, seed);
    }
    throw std::logic_error("unreachable");
}

double quantile_nearest_rank(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const auto rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[rank == 0 ? 0 : rank - 1];
}

const char* init_mode_name(ExperimentConfig::InitMode m) {
    switch (m) {
        case ExperimentConfig::InitMode::A0: return "a0";
        case ExperimentConfig::InitMode::Theta: return "theta";
        case ExperimentConfig::InitMode::Q: return "q";
    }
    return "?";
}

const char* rule_kind_name(ActivationRule::Kind k) {
    switch (k) {
        case ActivationRule::Kind::Majority: return "majority";
        case ActivationRule::Kind::Proportional: return "proportional";
        case ActivationRule::Kind::Classical: return "classical";
    }
    return "?";
}

}  // namespace

EnsembleSummary aggregate_records(const ExperimentConfig& cfg, double param_value,
                                  std::vector<RunRecord> records) {
    EnsembleSummary s;
    s.n = cfg.n;
    s.p = cfg.resolved_p();
    s.param_value = param_value;
    s.runs = records.size();
    s.base_seed = cfg.base_seed;

    const double nd = static_cast<double>(cfg.n);
    std::vector<double> fracs;
    fracs.reserve(records.size());
    double sum = 0.0, sum_t = 0.0, sum_a0 = 0.0;
    std::uint64_t full = 0, almost = 0, spread = 0;
    for (const auto& r : records) {
        const double frac = static_cast<double>(r.a_star) / nd;
        fracs.push_back(frac);
        sum += frac;
        sum_t += static_cast<double>(r.stopping_time);
        sum_a0 += static_cast<double>(r.a0);
        if (r.a_star == cfg.n) ++full;
        if (static_cast<double>(r.a_star) >= cfg.almost_fraction * nd) ++almost;
        if (static_cast<double>(r.a_star) >
            (1.0 + cfg.spread_epsilon) * static_cast<double>(r.a0))
            ++spread;
    }
    const double runs_d = static_cast<double>(records.size());
    s.mean_astar_frac = sum / runs_d;
    double ss = 0.0;
    for (double f : fracs) ss += (f - s.mean_astar_frac) * (f - s.mean_astar_frac);
    s.std_astar_frac = records.size() > 1 ? std::sqrt(ss / (runs_d - 1.0)) : 0.0;

    std::vector<double> sorted = fracs;
    std::sort(sorted.begin(), sorted.end());
    s.min_astar_frac = sorted.front();
    s.max_astar_frac = sorted.back();
    s.q05 = quantile_nearest_rank(sorted, 0.05);
    s.q50 = quantile_nearest_rank(sorted, 0.50);
    s.q95 = quantile_nearest_rank(sorted, 0.95);
    s.frac_full_perc = static_cast<double>(full) / runs_d;
    s.frac_almost_perc = static_cast<double>(almost) / runs_d;
    s.frac_spread_gt_eps = static_cast<double>(spread) / runs_d;
    s.mean_t = sum_t / runs_d;
    s.mean_a0 = sum_a0 / runs_d;
    s.records = std::move(records);
    return s;
}

EnsembleSummary run_ensemble(const ExperimentConfig& cfg) {
    cfg.validate();
    const double p = cfg.resolved_p();
    std::vector<RunRecord> records(cfg.runs);

    const unsigned workers = resolve_thread_count(cfg.threads, cfg.runs);
    std::atomic<std::uint64_t> next{0};
    auto body = [&]() {
        for (;;) {
            const std::uint64_t k = next.fetch_add(1, std::memory_order_relaxed);
            if (k >= cfg.runs) break;
            const std::uint64_t graph_seed = child_seed(cfg.base_seed, k, 0);
            const std::uint64_t init_seed = child_seed(cfg.base_seed, k, 1);
            const auto g = sample_gnp(cfg.n, p, graph_seed);
            const auto init = make_init(cfg, init_seed);
            const auto initial = draw_initial(init, cfg.n);
            const auto traj = run_percolation(g, initial, cfg.rule);
            records[k] = RunRecord{initial.size(), traj.a_star, traj.stopping_time};
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    return aggregate_records(cfg, cfg.init_value, std::move(records));
}

SweepResult sweep_transition(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!cfg.sweep) throw std::invalid_argument("sweep: config has no [sweep] section");

    SweepResult result;
    const auto& spec = *cfg.sweep;
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        ExperimentConfig point = cfg;
        point.sweep.reset();
        // Every grid point gets its own seed lane so points are independent
        // and insensitive to grid composition.
        point.base_seed = child_seed(cfg.base_seed, 0x53574545ull + i);
        const double v = spec.values[i];
        switch (spec.param) {
            case SweepParam::Q:
                point.init_mode = ExperimentConfig::InitMode::Q;
                point.init_value = v;
                break;
            case SweepParam::Theta:
                point.init_mode = ExperimentConfig::InitMode::Theta;
                point.init_value = v;
                break;
            case SweepParam::A0:
                point.init_mode = ExperimentConfig::InitMode::A0;
                point.init_value = v;
                break;
            case SweepParam::P:
                point.p = v;
                point.c = -1.0;
                break;
            case SweepParam::C:
                point.c = v;
                point.p = -1.0;
                break;
        }
        auto summary = run_ensemble(point);
        summary.param_value = v;
        result.points.push_back(std::move(summary));
    }

    // Crossing: first adjacent pair where the almost-percolation fraction
    // passes 0.5, linearly interpolated.
    result.crossing_note = "outside grid";
    for (std::size_t i = 0; i + 1 < result.points.size(); ++i) {
        const double f0 = result.points[i].frac_almost_perc;
        const double f1 = result.points[i + 1].frac_almost_perc;
        const bool upward = f0 < 0.5 && f1 >= 0.5;
        const bool downward = f0 >= 0.5 && f1 < 0.5;
        if (upward || downward) {
            const double v0 = result.points[i].param_value;
            const double v1 = result.points[i + 1].param_value;
            result.crossing = v0 + (0.5 - f0) * (v1 - v0) / (f1 - f0);
            result.crossing_note.clear();
            break;
        }
    }
    return result;
}

bool ComparisonReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const BoundCheck& c) { return c.pass; });
}

ComparisonReport compare_to_analytic(const EnsembleSummary& summary,
                                     const AnalyticParams& params) {
    ComparisonReport report;
    if (summary.runs == 0) return report;

    const double nd = static_cast<double>(summary.n);
    const double mean_a0 = summary.mean_a0;
    const auto regime = classify_regime(params, mean_a0);
    report.tag = regime.tag;

    constexpr double kBoundSlack = 1.1;   // finite-n slack on A* upper bounds
    constexpr double kX0Slack = 0.02;     // slack above x0 for the stopping fraction
    constexpr double kAlmostHigh = 0.95;  // supercritical almost-percolation rate
    constexpr double kSpreadLow = 0.05;   // subcritical significant-spread rate

    const double mean_astar = summary.mean_astar_frac * nd;
    switch (regime.tag) {
        case RegimeTag::SparseSubcritical: {
            const double bound = subcritical_bound(mean_a0, params.c) * kBoundSlack;
            report.checks.push_back({"mean A* <= 1.1 * A0/(1-g(c))", bound, mean_astar,
                                     mean_astar <= bound, ""});
            break;
        }
        case RegimeTag::CriticalWindow: {
            const double theta = mean_a0 / nd;
            if (theta < RegimeThresholds{}.small_theta) {
                const double bound = subcritical_bound(mean_a0, params.c) * kBoundSlack;
                report.checks.push_back({"mean A* <= 1.1 * A0/(1-g(c))", bound, mean_astar,
                                         mean_astar <= bound, ""});
            } else {
                AnalyticParams q = params;
                q.theta = theta;
                const auto root = find_x0(q);
                const double x0 = root.x0.value_or(1.0);
                const double hi = x0 + kX0Slack;
                report.checks.push_back({"mean A*/n in (theta, x0+0.02]", hi,
                                         summary.mean_astar_frac,
                                         summary.mean_astar_frac > theta &&
                                             summary.mean_astar_frac <= hi,
                                         root.double_root_suspected
                                             ? "double root suspected"
                                             : ""});
                report.checks.push_back({"no full percolation", 0.0, summary.frac_full_perc,
                                         summary.frac_full_perc == 0.0, ""});
            }
            break;
        }
        case RegimeTag::DenseSubcritical: {
            report.checks.push_back({"frac(A* > (1+eps) A0) <= 0.05", kSpreadLow,
                                     summary.frac_spread_gt_eps,
                                     summary.frac_spread_gt_eps <= kSpreadLow, ""});
            const double bound = kBoundSlack * mean_a0;
            report.checks.push_back({"mean A* <= 1.1 * A0", bound, mean_astar,
                                     mean_astar <= bound, ""});
            break;
        }
        case RegimeTag::DenseSupercritical: {
            report.checks.push_back({"frac(A* >= almost_fraction * n) >= 0.95", kAlmostHigh,
                                     summary.frac_almost_perc,
                                     summary.frac_almost_perc >= kAlmostHigh, ""});
            const double r_bound = expected_r_bound(summary.n, params.p, mean_a0);
            const double mean_inactive = (1.0 - summary.mean_astar_frac) * nd;
            report.checks.push_back({"mean inactive <= 2n exp(-omega^2/2)", r_bound,
                                     mean_inactive, mean_inactive <= r_bound, ""});
            break;
        }
    }
    return report;
}

// ---- serialization ----

namespace {
constexpr const char* kCsvHeader =
    "param_value,runs,mean_Astar_frac,std,q05,q50,q95,frac_full_perc,"
    "frac_almost_perc,frac_spread_gt_eps,mean_T";

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["n"] = cfg.n;
    j["p"] = cfg.resolved_p();
    j["c"] = cfg.resolved_c();
    j["init_mode"] = init_mode_name(cfg.init_mode);
    j["init_value"] = cfg.init_value;
    j["rule"] = rule_kind_name(cfg.rule.kind);
    j["alpha"] = cfg.rule.alpha;
    j["r"] = cfg.rule.r;
    j["strict"] = cfg.rule.strict;
    j["runs"] = cfg.runs;
    j["base_seed"] = cfg.base_seed;
    j["almost_fraction"] = cfg.almost_fraction;
    j["spread_epsilon"] = cfg.spread_epsilon;
    return j;
}

json summary_json(const EnsembleSummary& s) {
    json j;
    j["param_value"] = s.param_value;
    j["runs"] = s.runs;
    j["mean_Astar_frac"] = s.mean_astar_frac;
    j["std"] = s.std_astar_frac;
    j["min"] = s.min_astar_frac;
    j["max"] = s.max_astar_frac;
    j["q05"] = s.q05;
    j["q50"] = s.q50;
    j["q95"] = s.q95;
    j["frac_full_perc"] = s.frac_full_perc;
    j["frac_almost_perc"] = s.frac_almost_perc;
    j["frac_spread_gt_eps"] = s.frac_spread_gt_eps;
    j["mean_T"] = s.mean_t;
    j["mean_A0"] = s.mean_a0;
    return j;
}
}  // namespace

void write_summary_csv_header(std::ostream& out) { out << kCsvHeader << "\r\n"; }

void write_summary_csv_row(std::ostream& out, const EnsembleSummary& s) {
    out << fmt_double(s.param_value) << ',' << s.runs << ',' << fmt_double(s.mean_astar_frac)
        << ',' << fmt_double(s.std_astar_frac) << ',' << fmt_double(s.q05) << ','
        << fmt_double(s.q50) << ',' << fmt_double(s.q95) << ',' << fmt_double(s.frac_full_perc)
        << ',' << fmt_double(s.frac_almost_perc) << ',' << fmt_double(s.frac_spread_gt_eps)
        << ',' << fmt_double(s.mean_t) << "\r\n";
}

std::string ensemble_json(const ExperimentConfig& cfg, const EnsembleSummary& s) {
    json j;
    j["schema"] = "perco-ensemble-v1";
    j["seed_scheme"] = kSeedSchemeVersion;
    j["config"] = config_json(cfg);
    j["config_hash"] = config_hash(cfg);
    j["results"] = summary_json(s);
    return j.dump(2) + "\n";
}

std::string sweep_json(const ExperimentConfig& cfg, const SweepResult& r) {
    json j;
    j["schema"] = "perco-sweep-v1";
    j["seed_scheme"] = kSeedSchemeVersion;
    j["config"] = config_json(cfg);
    j["config_hash"] = config_hash(cfg);
    if (cfg.sweep) {
        j["sweep_param"] = [&] {
            switch (cfg.sweep->param) {
                case SweepParam::Q: return "q";
                case SweepParam::Theta: return "theta";
                case SweepParam::A0: return "a0";
                case SweepParam::P: return "p";
                case SweepParam::C: return "c";
            }
            return "?";
        }();
    }
    j["points"] = json::array();
    for (const auto& point : r.points) j["points"].push_back(summary_json(point));
    if (r.crossing)
        j["crossing"] = *r.crossing;
    else
        j["crossing"] = r.crossing_note;
    return j.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& out, const std::vector<std::uint32_t>& a_series) {
    out << "t,A_t\r\n";
    for (std::size_t t = 0; t < a_series.size(); ++t)
        out << t << ',' << a_series[t] << "\r\n";
}

}  // namespace perco
