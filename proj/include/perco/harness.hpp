#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "perco/analytics.hpp"
#include "perco/rules.hpp"

namespace perco {

enum class SweepParam { Q, Theta, A0, P, C };

struct SweepSpec {
    SweepParam param = SweepParam::Q;
    std::vector<double> values;  // ascending
};

// Full description of one Monte Carlo experiment. Every run samples a
// fresh graph and a fresh initial set (quenched over both), with child
// seeds derived from base_seed and the run index.
struct ExperimentConfig {
    std::uint32_t n = 0;
    double p = -1.0;     // exactly one of p, c is set; the other is derived
    double c = -1.0;

    enum class InitMode { A0, Theta, Q } init_mode = InitMode::A0;
    double init_value = 0.0;  // a0 count, theta fraction, or q probability

    ActivationRule rule;
    std::uint64_t runs = 1;
    std::uint64_t base_seed = 1;

    double almost_fraction = 0.99;  // A* >= almost_fraction*n counts as almost percolation
    double spread_epsilon = 0.1;    // A* > (1+eps)*A0 counts as significant spread
    std::uint64_t max_cells = 1'000'000'000;  // refuse when n*runs exceeds this
    unsigned threads = 0;                     // 0: PERCO_THREADS or hardware

    std::optional<SweepSpec> sweep;

    double resolved_p() const { return p >= 0.0 ? p : c / static_cast<double>(n); }
    double resolved_c() const { return c >= 0.0 ? c : p * static_cast<double>(n); }
    void validate() const;  // throws std::invalid_argument
};

struct RunRecord {
    std::uint64_t a0 = 0;
    std::uint64_t a_star = 0;
    std::uint64_t stopping_time = 0;
};

struct EnsembleSummary {
    // config echo
    std::uint32_t n = 0;
    double p = 0.0;
    double param_value = 0.0;  // the init parameter (a0 / theta / q)
    std::uint64_t runs = 0;
    std::uint64_t base_seed = 0;

    double mean_astar_frac = 0.0;
    double std_astar_frac = 0.0;
    double min_astar_frac = 0.0;
    double max_astar_frac = 0.0;
    double q05 = 0.0, q50 = 0.0, q95 = 0.0;
    double frac_full_perc = 0.0;
    double frac_almost_perc = 0.0;
    double frac_spread_gt_eps = 0.0;
    double mean_t = 0.0;
    double mean_a0 = 0.0;

    std::vector<RunRecord> records;  // run-index order
};

EnsembleSummary run_ensemble(const ExperimentConfig& cfg);

// Recomputes the aggregate fields of a summary from its records (used to
// check aggregation and by sweep reporting).
EnsembleSummary aggregate_records(const ExperimentConfig& cfg, double param_value,
                                  std::vector<RunRecord> records);

struct SweepResult {
    std::vector<EnsembleSummary> points;              // one per grid value
    std::optional<double> crossing;                   // almost-perc fraction passes 0.5
    std::string crossing_note;                        // "outside grid" when absent
};

SweepResult sweep_transition(const ExperimentConfig& cfg);

// One paper bound checked against an empirical statistic.
struct BoundCheck {
    std::string name;
    double bound = 0.0;
    double statistic = 0.0;
    bool pass = false;
    std::string note;
};

struct ComparisonReport {
    RegimeTag tag = RegimeTag::SparseSubcritical;
    std::vector<BoundCheck> checks;
    bool all_pass() const;
};

// Checks the summary against the closed-form predictions applicable to its
// regime. Empty summary (runs == 0) yields an empty report.
ComparisonReport compare_to_analytic(const EnsembleSummary& summary,
                                     const AnalyticParams& params);

// ---- serialization ----

// CSV columns (RFC 4180, CRLF line endings, header always present):
// param_value,runs,mean_Astar_frac,std,q05,q50,q95,frac_full_perc,
// frac_almost_perc,frac_spread_gt_eps,mean_T
void write_summary_csv_header(std::ostream& out);
void write_summary_csv_row(std::ostream& out, const EnsembleSummary& s);

std::string ensemble_json(const ExperimentConfig& cfg, const EnsembleSummary& s);
std::string sweep_json(const ExperimentConfig& cfg, const SweepResult& r);

// Trajectory CSV: header "t,A_t", one row per step.
void write_trajectory_csv(std::ostream& out, const std::vector<std::uint32_t>& a_series);

unsigned resolve_thread_count(unsigned requested, std::uint64_t work_items);

}  // namespace perco
