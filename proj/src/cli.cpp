#include "perco/cli.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "perco/analytics.hpp"
#include "perco/config.hpp"
#include "perco/engine.hpp"
#include "perco/graph.hpp"
#include "perco/harness.hpp"
#include "perco/oracle.hpp"
#include "perco/rng.hpp"

namespace perco {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitOracle = 4;

void print_value(double v) { std::printf("%.12g\n", v); }

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

struct EnsembleFlags {
    CLI::Option* config = nullptr;
    CLI::Option* n = nullptr;
    CLI::Option* p = nullptr;
    CLI::Option* c = nullptr;
    CLI::Option* a0 = nullptr;
    CLI::Option* theta = nullptr;
    CLI::Option* q = nullptr;
    CLI::Option* runs = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* rule = nullptr;
    CLI::Option* alpha = nullptr;
    CLI::Option* r = nullptr;
    CLI::Option* strict = nullptr;
    CLI::Option* almost = nullptr;
    CLI::Option* eps = nullptr;
    CLI::Option* max_cells = nullptr;
    CLI::Option* threads = nullptr;

    std::string config_path;
    std::uint32_t n_v = 0;
    double p_v = 0, c_v = 0, a0_v = 0, theta_v = 0, q_v = 0;
    std::uint64_t runs_v = 1, seed_v = 1, max_cells_v = 0;
    std::string rule_v = "majority";
    double alpha_v = 0.5;
    std::uint32_t r_v = 2;
    bool strict_v = false;
    double almost_v = 0.99, eps_v = 0.1;
    unsigned threads_v = 0;

    void attach(CLI::App* cmd, bool config_required) {
        config = cmd->add_option("--config", config_path, "experiment config file");
        if (config_required) config->required();
        n = cmd->add_option("--n", n_v, "vertex count");
        p = cmd->add_option("--p", p_v, "edge probability");
        c = cmd->add_option("--c", c_v, "mean degree c = n*p");
        p->excludes(c);
        a0 = cmd->add_option("--a0", a0_v, "initial active count");
        theta = cmd->add_option("--theta", theta_v, "initial active fraction");
        q = cmd->add_option("--q", q_v, "independent initial activation probability");
        a0->excludes(theta);
        a0->excludes(q);
        theta->excludes(q);
        runs = cmd->add_option("--runs", runs_v, "number of Monte Carlo runs");
        seed = cmd->add_option("--seed", seed_v, "base seed (default 1)");
        rule = cmd->add_option("--rule", rule_v, "majority|proportional|classical");
        alpha = cmd->add_option("--alpha", alpha_v, "proportional rule threshold fraction");
        r = cmd->add_option("--r", r_v, "classical rule threshold");
        strict = cmd->add_flag("--strict", strict_v, "strict majority comparison");
        almost = cmd->add_option("--almost", almost_v, "almost-percolation fraction (default 0.99)");
        eps = cmd->add_option("--eps", eps_v, "significant-spread epsilon (default 0.1)");
        max_cells = cmd->add_option("--max-cells", max_cells_v, "n*runs budget guard");
        threads = cmd->add_option("--threads", threads_v, "worker cap (0 = PERCO_THREADS/auto)");
    }

    ExperimentConfig build() const {
        ExperimentConfig cfg;
        bool from_file = false;
        if (config->count()) {
            cfg = load_config(config_path);
            from_file = true;
        }
        if (n->count()) cfg.n = n_v;
        if (p->count()) { cfg.p = p_v; cfg.c = -1.0; }
        if (c->count()) { cfg.c = c_v; cfg.p = -1.0; }
        if (a0->count()) { cfg.init_mode = ExperimentConfig::InitMode::A0; cfg.init_value = a0_v; }
        if (theta->count()) { cfg.init_mode = ExperimentConfig::InitMode::Theta; cfg.init_value = theta_v; }
        if (q->count()) { cfg.init_mode = ExperimentConfig::InitMode::Q; cfg.init_value = q_v; }
        if (!from_file && !n->count()) throw ConfigError("missing --config or --n");
        if (!from_file && !p->count() && !c->count()) throw ConfigError("one of --p, --c is required");
        if (!from_file && !a0->count() && !theta->count() && !q->count())
            throw ConfigError("one of --a0, --theta, --q is required");

        if (rule->count() || alpha->count() || r->count() || strict->count()) {
            std::string kind = rule->count() ? rule_v : std::string();
            if (kind.empty()) {
                switch (cfg.rule.kind) {
                    case ActivationRule::Kind::Majority: kind = "majority"; break;
                    case ActivationRule::Kind::Proportional: kind = "proportional"; break;
                    case ActivationRule::Kind::Classical: kind = "classical"; break;
                }
            }
            const bool strict_eff = strict->count() ? strict_v : cfg.rule.strict;
            if (kind == "majority") cfg.rule = ActivationRule::majority(strict_eff);
            else if (kind == "proportional")
                cfg.rule = ActivationRule::proportional(alpha->count() ? alpha_v : cfg.rule.alpha,
                                                        strict_eff);
            else if (kind == "classical")
                cfg.rule = ActivationRule::classical(r->count() ? r_v : cfg.rule.r);
            else throw ConfigError("unknown rule '" + kind + "'");
        }
        if (runs->count()) cfg.runs = runs_v;
        if (seed->count()) cfg.base_seed = seed_v;
        if (almost->count()) cfg.almost_fraction = almost_v;
        if (eps->count()) cfg.spread_epsilon = eps_v;
        if (max_cells->count()) cfg.max_cells = max_cells_v;
        if (threads->count()) cfg.threads = threads_v;
        return cfg;
    }
};

int cmd_gen(std::uint32_t n, double p, std::uint64_t seed,
            const std::optional<std::string>& out_path) {
    const auto g = sample_gnp(n, p, seed);
    if (out_path) {
        auto out = open_out(*out_path);
        write_edge_list(g, out);
    } else {
        write_edge_list(g, std::cout);
    }
    return kExitOk;
}

int cmd_oracle_check(std::uint32_t max_n, const std::optional<std::string>& out_path) {
    const auto report = oracle::run_exhaustive_check(max_n);

    // Cross-check the closed-form activation probability against full
    // enumeration on the n <= 20 grid.
    double max_diff = 0.0;
    for (std::uint32_t n = 2; n <= 20; ++n)
        for (std::uint32_t t = 0; t < n; ++t)
            for (int pi = 1; pi <= 9; ++pi) {
                const double p = pi / 10.0;
                const double diff = std::abs(pi_plus_exact(n, t, p) -
                                             oracle::exact_pi_plus_enumeration(n, t, p));
                max_diff = std::max(max_diff, diff);
            }
    const bool pi_pass = max_diff <= 1e-12;

    nlohmann::json j;
    j["schema"] = "perco-oracle-check-v1";
    j["max_n"] = max_n;
    j["cases_checked"] = report.cases_checked;
    j["sampled_rule_cases"] = report.sampled_rule_cases;
    j["mismatches"] = nlohmann::json::array();
    for (const auto& m : report.mismatches) j["mismatches"].push_back(m.detail);
    j["pi_plus_max_abs_diff"] = max_diff;
    j["pi_plus_pass"] = pi_pass;
    const bool pass = report.pass() && pi_pass;
    j["pass"] = pass;
    const std::string text = j.dump(2) + "\n";
    if (out_path) {
        auto out = open_out(*out_path);
        out << text;
    }
    std::cout << text;
    return pass ? kExitOk : kExitOracle;
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"majority/proportional/classical bootstrap percolation on G(n,p)"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "sample a G(n,p) graph and write it as an edge list");
    std::uint32_t gen_n = 0;
    double gen_p = 0.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--n", gen_n, "vertex count")->required();
    gen->add_option("--p", gen_p, "edge probability")->required();
    gen->add_option("--seed", gen_seed, "sampler seed")->required();
    auto* gen_out_opt = gen->add_option("--out", gen_out, "output path (default stdout)");

    // run
    auto* run = app.add_subcommand("run", "run one percolation and report A*, T");
    EnsembleFlags run_flags;
    run_flags.attach(run, false);
    std::string traj_path;
    auto* traj_opt = run->add_option("--traj", traj_path, "write the trajectory CSV here");

    // ensemble
    auto* ens = app.add_subcommand("ensemble", "run a seeded Monte Carlo ensemble");
    EnsembleFlags ens_flags;
    ens_flags.attach(ens, false);
    std::string ens_out;
    auto* ens_out_opt = ens->add_option("--out", ens_out, "output prefix (.json/.csv)");

    // sweep
    auto* swp = app.add_subcommand("sweep", "run ensembles over a parameter grid");
    EnsembleFlags swp_flags;
    swp_flags.attach(swp, true);
    std::string swp_out;
    auto* swp_out_opt = swp->add_option("--out", swp_out, "output prefix (.json/.csv)");

    // analytic
    auto* ana = app.add_subcommand("analytic", "evaluate closed-form quantities");
    ana->require_subcommand(1);
    struct {
        std::uint64_t n = 0, t = 0;
        double p = -1, c = -1, theta = 0, x = 0, a0 = -1, mean = -1, z = -1;
        double grid_step = kDefaultGridStep, tol = kDefaultRootTol;
        bool limit = false;
    } av;

    auto add_np = [&](CLI::App* cmd, bool need_t) {
        cmd->add_option("--n", av.n, "vertex count")->required();
        if (need_t) cmd->add_option("--t", av.t, "exploration step")->required();
        auto* po = cmd->add_option("--p", av.p, "edge probability");
        auto* co = cmd->add_option("--c", av.c, "mean degree");
        po->excludes(co);
    };
    auto resolved_p = [&]() {
        if (av.p >= 0) return av.p;
        if (av.c >= 0) return av.c / static_cast<double>(av.n);
        throw ConfigError("one of --p, --c is required");
    };

    auto* a_pi_exact = ana->add_subcommand("pi-exact", "activation probability envelope, exact");
    add_np(a_pi_exact, true);
    auto* a_pi_poisson = ana->add_subcommand("pi-poisson", "activation probability envelope, Poissonised");
    add_np(a_pi_poisson, true);
    auto* a_f = ana->add_subcommand("f", "drift function f_{c,theta}(x)");
    add_np(a_f, false);
    a_f->add_option("--theta", av.theta, "initial fraction")->required();
    a_f->add_option("--x", av.x, "evaluation point in [0,1]")->required();
    a_f->add_flag("--limit", av.limit, "n->infinity variant");
    auto* a_x0 = ana->add_subcommand("x0", "smallest sign-change root of f");
    add_np(a_x0, false);
    a_x0->add_option("--theta", av.theta, "initial fraction")->required();
    a_x0->add_option("--grid-step", av.grid_step, "scan step (default 1e-3)");
    a_x0->add_option("--tol", av.tol, "bisection width (default 1e-9)");
    a_x0->add_flag("--limit", av.limit, "n->infinity variant");
    auto* a_g = ana->add_subcommand("g", "spread rate g(c) = (1+c) c e^{-c}");
    a_g->add_option("--c", av.c, "mean degree")->required();
    auto* a_bounds = ana->add_subcommand("bounds", "tail and expectation bounds");
    a_bounds->add_option("--n", av.n, "vertex count");
    a_bounds->add_option("--t", av.t, "exploration step");
    a_bounds->add_option("--p", av.p, "edge probability");
    a_bounds->add_option("--a0", av.a0, "initial active count");
    a_bounds->add_option("--mean", av.mean, "binomial mean");
    a_bounds->add_option("--z", av.z, "deviation");
    auto* a_classify = ana->add_subcommand("classify", "regime classification");
    add_np(a_classify, false);
    auto* cl_a0 = a_classify->add_option("--a0", av.a0, "initial active count");
    auto* cl_theta = a_classify->add_option("--theta", av.theta, "initial fraction");
    cl_a0->excludes(cl_theta);

    // oracle-check
    auto* ock = app.add_subcommand("oracle-check", "cross-validate engine against brute force");
    std::uint32_t ock_max_n = 6;
    std::string ock_out;
    ock->add_option("--max-n", ock_max_n, "largest exhaustive size (<= 6)");
    auto* ock_out_opt = ock->add_option("--out", ock_out, "report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (gen->parsed())
        return cmd_gen(gen_n, gen_p, gen_seed,
                       gen_out_opt->count() ? std::optional(gen_out) : std::nullopt);

    if (run->parsed()) {
        ExperimentConfig cfg = run_flags.build();
        cfg.runs = 1;
        cfg.validate();
        const auto g = sample_gnp(cfg.n, cfg.resolved_p(), child_seed(cfg.base_seed, 0, 0));
        InitialSpec init;
        switch (cfg.init_mode) {
            case ExperimentConfig::InitMode::A0:
                init = InitialSpec::fixed_size(static_cast<std::uint64_t>(cfg.init_value),
                                               child_seed(cfg.base_seed, 0, 1));
                break;
            case ExperimentConfig::InitMode::Theta:
                init = InitialSpec::fixed_size(
                    static_cast<std::uint64_t>(std::llround(cfg.init_value * cfg.n)),
                    child_seed(cfg.base_seed, 0, 1));
                break;
            case ExperimentConfig::InitMode::Q:
                init = InitialSpec::bernoulli(cfg.init_value, child_seed(cfg.base_seed, 0, 1));
                break;
        }
        const auto traj = run_percolation(g, init, cfg.rule);
        std::printf("n=%u p=%.10g m=%" PRIu64 " A0=%" PRIu64 " A_star=%" PRIu64 " T=%" PRIu64
                    " seed=%" PRIu64 "\n",
                    g.n, cfg.resolved_p(), g.edge_count, traj.a0(), traj.a_star,
                    traj.stopping_time, cfg.base_seed);
        if (traj_opt->count()) {
            auto out = open_out(traj_path);
            write_trajectory_csv(out, traj.a_series);
        }
        return kExitOk;
    }

    if (ens->parsed()) {
        const ExperimentConfig cfg = ens_flags.build();
        const auto summary = run_ensemble(cfg);
        std::ostringstream line;
        write_summary_csv_header(line);
        write_summary_csv_row(line, summary);
        std::cout << line.str();
        if (ens_out_opt->count()) {
            auto js = open_out(ens_out + ".json");
            js << ensemble_json(cfg, summary);
            auto cs = open_out(ens_out + ".csv");
            write_summary_csv_header(cs);
            write_summary_csv_row(cs, summary);
            std::cout << "wrote " << ens_out << ".json, " << ens_out << ".csv\n";
        }
        return kExitOk;
    }

    if (swp->parsed()) {
        const ExperimentConfig cfg = swp_flags.build();
        if (!cfg.sweep) throw ConfigError("sweep: config file needs a [sweep] section");
        const auto result = sweep_transition(cfg);
        std::ostringstream text;
        write_summary_csv_header(text);
        for (const auto& point : result.points) write_summary_csv_row(text, point);
        std::cout << text.str();
        if (result.crossing)
            std::printf("crossing=%.10g\n", *result.crossing);
        else
            std::printf("crossing=%s\n", result.crossing_note.c_str());
        if (swp_out_opt->count()) {
            auto js = open_out(swp_out + ".json");
            js << sweep_json(cfg, result);
            auto cs = open_out(swp_out + ".csv");
            cs << text.str();
            std::cout << "wrote " << swp_out << ".json, " << swp_out << ".csv\n";
        }
        return kExitOk;
    }

    if (ana->parsed()) {
        if (a_pi_exact->parsed()) {
            print_value(pi_plus_exact(av.n, av.t, resolved_p()));
        } else if (a_pi_poisson->parsed()) {
            print_value(pi_plus_poisson(av.n, av.t, resolved_p()));
        } else if (a_f->parsed()) {
            const auto params = AnalyticParams::from_np(av.n, resolved_p(), av.theta);
            print_value(f_c_theta(av.x, params,
                                  av.limit ? FSeriesVariant::Limit : FSeriesVariant::FiniteN));
        } else if (a_x0->parsed()) {
            const auto params = AnalyticParams::from_np(av.n, resolved_p(), av.theta);
            const auto root = find_x0(params, av.grid_step, av.tol,
                                      av.limit ? FSeriesVariant::Limit : FSeriesVariant::FiniteN);
            if (root.x0)
                std::printf("x0=%.12g bracket=[%.12g,%.12g] sign_change=%d double_root_suspected=%d\n",
                            *root.x0, root.bracket_lo, root.bracket_hi, root.sign_change ? 1 : 0,
                            root.double_root_suspected ? 1 : 0);
            else
                std::printf("x0=none\n");
        } else if (a_g->parsed()) {
            if (av.c < 0) throw ConfigError("g: --c is required");
            print_value(g_of_c(av.c));
        } else if (a_bounds->parsed()) {
            bool printed = false;
            if (av.mean >= 0 && av.z >= 0) {
                std::printf("chernoff_upper=%.12g\n", chernoff_upper(av.mean, av.z));
                std::printf("chernoff_lower=%.12g\n", chernoff_lower(av.mean, av.z));
                printed = true;
            }
            if (av.n > 0 && av.p >= 0) {
                if (av.t > 0) {
                    std::printf("pi_upper_first_mark=%.12g\n",
                                pi_upper_first_mark(av.n, av.t, av.p));
                    if (static_cast<double>(av.t) > static_cast<double>(av.n) / 2)
                        std::printf("delta_upper_bound=%.12g\n",
                                    delta_upper_bound(av.n, av.p, static_cast<double>(av.t)));
                    printed = true;
                }
                if (av.a0 >= 0) {
                    std::printf("supercritical_margin=%.12g\n",
                                supercritical_margin(av.n, av.p, av.a0));
                    std::printf("expected_R_bound=%.12g\n", expected_r_bound(av.n, av.p, av.a0));
                    printed = true;
                }
            }
            if (!printed)
                throw ConfigError("bounds: give --mean/--z, or --n/--p with --t and/or --a0");
        } else if (a_classify->parsed()) {
            const double p = resolved_p();
            double a0 = av.a0;
            if (cl_theta->count()) a0 = av.theta * static_cast<double>(av.n);
            if (a0 < 0) throw ConfigError("classify: one of --a0, --theta is required");
            const auto params = AnalyticParams::from_np(av.n, p, a0 / static_cast<double>(av.n));
            const auto rep = classify_regime(params, a0);
            std::printf("tag=%s\nprediction=%s\nbound=%.10g\nmargin=%.10g\n",
                        rep.tag_name.c_str(), rep.prediction.c_str(), rep.bound, rep.margin);
        }
        return kExitOk;
    }

    if (ock->parsed())
        return cmd_oracle_check(ock_max_n,
                                ock_out_opt->count() ? std::optional(ock_out) : std::nullopt);

    return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    try {
        return dispatch(argc, argv);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace perco
