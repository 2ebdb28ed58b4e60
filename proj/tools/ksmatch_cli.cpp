// Command-line surface for the allocation-graph matching library:
// closed-form thresholds and predictions, fluid trajectories, seeded
// simulations, alpha sweeps, core-graph checks and the analytic self-check.
//
// Exit codes: 0 success, 2 usage error, 3 infeasible parameters,
// 4 self-check failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ksmatch/analysis.hpp"
#include "ksmatch/matching.hpp"
#include "ksmatch/model.hpp"
#include "ksmatch/montecarlo.hpp"

namespace {

using namespace ksmatch;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

struct CommonOpts {
    std::string format = "table";
    std::string output;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--output", opts.output, "Write to file instead of stdout");
}

int cmd_thresholds(int d, const CommonOpts& opts) {
    const double z1 = solve_z1(d);
    const double alpha1 = compute_alpha1(d);
    const double m_over_n = 1.0 / alpha1;
    std::ostringstream out;
    if (opts.format == "json") {
        out << "{\"d\": " << d << ", \"z1\": " << fmt(z1)
            << ", \"alpha1\": " << fmt(alpha1)
            << ", \"m_over_n\": " << fmt(m_over_n) << "}\n";
    } else if (opts.format == "csv") {
        out << "d,z1,alpha1,m_over_n\n"
            << d << ',' << fmt(z1) << ',' << fmt(alpha1) << ',' << fmt(m_over_n)
            << '\n';
    } else {
        char line[160];
        std::snprintf(line, sizeof line, "%-4s %-22s %-22s %-22s\n", "d", "z1",
                      "alpha1", "m_over_n");
        out << line;
        std::snprintf(line, sizeof line, "%-4d %-22.15g %-22.15g %-22.15g\n", d,
                      z1, alpha1, m_over_n);
        out << line;
    }
    write_output(out.str(), opts.output);
    return 0;
}

int cmd_predict(int d, double alpha, std::int64_t n, const CommonOpts& opts) {
    std::int64_t m = 0;
    if (n > 0) m = std::llround(static_cast<double>(n) / alpha);
    const ThresholdReport r = predict(alpha, d, n, m);
    std::ostringstream out;
    if (opts.format == "json") {
        out << "{\"d\": " << r.d << ", \"alpha\": " << fmt(r.alpha)
            << ", \"z1\": " << fmt(r.z1) << ", \"alpha1\": " << fmt(r.alpha1)
            << ", \"z_star\": " << fmt(r.z_star)
            << ", \"tau1_fraction\": " << fmt(r.tau1_fraction)
            << ", \"mu_gamma1_fraction_of_m\": " << fmt(r.mu_gamma1_fraction_of_m)
            << ", \"mu_fraction_of_n\": " << fmt(r.mu_fraction_of_n) << "}\n";
    } else if (opts.format == "csv") {
        out << "d,alpha,z1,alpha1,z_star,tau1_fraction,mu_gamma1_fraction_of_m,"
               "mu_fraction_of_n\n"
            << r.d << ',' << fmt(r.alpha) << ',' << fmt(r.z1) << ','
            << fmt(r.alpha1) << ',' << fmt(r.z_star) << ','
            << fmt(r.tau1_fraction) << ',' << fmt(r.mu_gamma1_fraction_of_m)
            << ',' << fmt(r.mu_fraction_of_n) << '\n';
    } else {
        char line[160];
        const auto row = [&](const char* name, double v) {
            std::snprintf(line, sizeof line, "%-26s %.15g\n", name, v);
            out << line;
        };
        row("alpha", r.alpha);
        row("z1", r.z1);
        row("alpha1", r.alpha1);
        row("z_star", r.z_star);
        row("tau1_fraction", r.tau1_fraction);
        row("mu_gamma1_fraction_of_m", r.mu_gamma1_fraction_of_m);
        row("mu_fraction_of_n", r.mu_fraction_of_n);
    }
    write_output(out.str(), opts.output);
    return 0;
}

int cmd_trajectory(int d, double alpha, std::int64_t n, int points,
                   const CommonOpts& opts) {
    const std::int64_t m = std::llround(static_cast<double>(n) / alpha);
    const auto grid = default_zeta_grid(d, n, m, points);
    const auto traj = trajectory(d, n, m, grid);
    std::ostringstream out;
    if (opts.format == "json") {
        out << "[";
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const auto& p = traj[i];
            out << (i ? ",\n " : "\n ") << "{\"t\": " << fmt(p.t)
                << ", \"zeta\": " << fmt(p.zeta) << ", \"w\": " << fmt(p.w)
                << ", \"y1\": " << fmt(p.y1) << ", \"y\": " << fmt(p.y) << "}";
        }
        out << "\n]\n";
    } else if (opts.format == "csv") {
        out << "t,zeta,w,y1,y\n";
        for (const auto& p : traj) {
            out << fmt(p.t) << ',' << fmt(p.zeta) << ',' << fmt(p.w) << ','
                << fmt(p.y1) << ',' << fmt(p.y) << '\n';
        }
    } else {
        char line[200];
        std::snprintf(line, sizeof line, "%-18s %-18s %-18s %-18s %-18s\n", "t",
                      "zeta", "w", "y1", "y");
        out << line;
        for (const auto& p : traj) {
            std::snprintf(line, sizeof line,
                          "%-18.10g %-18.10g %-18.10g %-18.10g %-18.10g\n", p.t,
                          p.zeta, p.w, p.y1, p.y);
            out << line;
        }
    }
    write_output(out.str(), opts.output);
    return 0;
}

int cmd_simulate(int d, double alpha, std::int64_t n, std::int64_t trials,
                 std::uint64_t seed, int parallelism, const CommonOpts& opts) {
    ModelParams params;
    params.n = n;
    params.m = std::llround(static_cast<double>(n) / alpha);
    params.d = d;
    params.seed = seed;
    const ExperimentReport rep = run_experiment(params, trials, parallelism);
    std::ostringstream out;
    if (opts.format == "json") {
        out << export_report(rep, ExportFormat::json);
    } else if (opts.format == "csv") {
        out << export_report(rep, ExportFormat::csv);
    } else {
        char line[200];
        const auto row = [&](const char* name, double v) {
            std::snprintf(line, sizeof line, "%-26s %.15g\n", name, v);
            out << line;
        };
        out << "simulation: n=" << params.n << " m=" << params.m
            << " d=" << params.d << " alpha=" << fmt(params.alpha())
            << " trials=" << trials << " seed=" << seed << "\n\n";
        row("tau1_fraction_mean", rep.aggregates.tau1_fraction_mean);
        row("tau1_fraction_stddev", rep.aggregates.tau1_fraction_stddev);
        row("mu_fraction_mean", rep.aggregates.mu_fraction_mean);
        row("mu_fraction_stddev", rep.aggregates.mu_fraction_stddev);
        row("fraction_perfect", rep.aggregates.fraction_perfect);
        row("max_dev_v1", rep.aggregates.max_dev_v1);
        row("max_dev_v", rep.aggregates.max_dev_v);
        out << '\n';
        row("predicted tau1_fraction", rep.predicted.tau1_fraction);
        row("predicted mu_fraction", rep.predicted.mu_fraction_of_n);
        row("predicted z_star", rep.predicted.z_star);
        row("predicted alpha1", rep.predicted.alpha1);
    }
    write_output(out.str(), opts.output);
    return 0;
}

int cmd_sweep(int d, double alpha_min, double alpha_max, int steps,
              std::int64_t n, std::int64_t trials, std::uint64_t seed,
              int parallelism, const CommonOpts& opts) {
    const SweepTable table =
        sweep_alpha(d, alpha_min, alpha_max, steps, n, trials, seed, parallelism);
    std::ostringstream out;
    if (opts.format == "json") {
        out << export_sweep(table, ExportFormat::json);
    } else if (opts.format == "csv") {
        out << export_sweep(table, ExportFormat::csv);
    } else {
        char line[240];
        std::snprintf(line, sizeof line, "%-10s %-9s %-14s %-14s %-14s %-16s %-12s\n",
                      "alpha", "m", "frac_tau1=n", "frac_mu=n", "mean_mu/n",
                      "pred_tau1/n", "pred_mu/n");
        out << line;
        for (const auto& r : table.rows) {
            std::snprintf(line, sizeof line,
                          "%-10.6g %-9lld %-14.6g %-14.6g %-14.6g %-16.6g %-12.6g\n",
                          r.alpha, static_cast<long long>(r.m), r.frac_tau1_full,
                          r.frac_mu_perfect, r.mean_mu_fraction,
                          r.pred_tau1_fraction, r.pred_mu_fraction);
            out << line;
        }
    }
    write_output(out.str(), opts.output);
    return 0;
}

int cmd_core_check(int d, std::int64_t n, std::int64_t m, std::int64_t trials,
                   std::uint64_t seed, const CommonOpts& opts) {
    std::int64_t perfect = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        const BipartiteGraph g = sample_core_graph(n, m, d, rng);
        if (max_matching(g).size() == std::min(n, m)) ++perfect;
    }
    const double fraction = static_cast<double>(perfect) / static_cast<double>(trials);
    std::ostringstream out;
    if (opts.format == "json") {
        out << "{\"d\": " << d << ", \"n\": " << n << ", \"m\": " << m
            << ", \"trials\": " << trials << ", \"perfect\": " << perfect
            << ", \"perfect_fraction\": " << fmt(fraction) << "}\n";
    } else if (opts.format == "csv") {
        out << "d,n,m,trials,perfect,perfect_fraction\n"
            << d << ',' << n << ',' << m << ',' << trials << ',' << perfect
            << ',' << fmt(fraction) << '\n';
    } else {
        out << "core graphs: d=" << d << " n=" << n << " m=" << m
            << " trials=" << trials << '\n'
            << "perfect matchings (size min{n,m}): " << perfect << " / " << trials
            << "  (" << fmt(fraction) << ")\n";
    }
    write_output(out.str(), opts.output);
    return 0;
}

int cmd_self_check(const CommonOpts& opts) {
    const auto checks = run_self_check();
    std::ostringstream out;
    bool all_pass = true;
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        char line[160];
        std::snprintf(line, sizeof line, "%-26s %s  (worst %.3g)\n",
                      c.name.c_str(), c.pass ? "PASS" : "FAIL", c.worst);
        out << line;
    }
    out << (all_pass ? "self-check: all properties hold\n"
                     : "self-check: FAILURES detected\n");
    write_output(out.str(), opts.output);
    return all_pass ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random bipartite allocation graphs: Karp-Sipser matching, "
                 "load thresholds and fluid-limit cross-validation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value file with option defaults");

    int d = 3;
    double alpha = 0.9, alpha_min = 0.7, alpha_max = 0.95;
    std::int64_t n = 100000, m = 1000, trials = 20;
    int points = 100, steps = 1, parallelism = 1;
    std::uint64_t seed = 1;

    CommonOpts thresholds_opts, predict_opts, traj_opts, sim_opts, sweep_opts,
        core_opts, self_opts;

    auto* c_thresholds = app.add_subcommand(
        "thresholds", "Phase-1 sufficiency threshold for a given d");
    c_thresholds->add_option("--d", d, "Choices per left vertex")
        ->required()
        ->check(CLI::Range(3, 64));
    add_common(c_thresholds, thresholds_opts);

    auto* c_predict = app.add_subcommand(
        "predict", "Predicted tau1 and matching fractions at (d, alpha)");
    c_predict->add_option("--d", d)->required()->check(CLI::Range(3, 64));
    c_predict->add_option("--alpha", alpha, "Ratio n/m")
        ->required()
        ->check(CLI::PositiveNumber);
    c_predict->add_option("--n", n, "Optional left-vertex count")
        ->default_val(0);
    add_common(c_predict, predict_opts);

    auto* c_traj = app.add_subcommand(
        "trajectory", "Fluid-limit trajectory of the Phase-1 process");
    c_traj->add_option("--d", d)->required()->check(CLI::Range(3, 64));
    c_traj->add_option("--alpha", alpha)->required()->check(CLI::PositiveNumber);
    c_traj->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    c_traj->add_option("--points", points)->default_val(100)
        ->check(CLI::PositiveNumber);
    add_common(c_traj, traj_opts);

    auto* c_sim = app.add_subcommand(
        "simulate", "Seeded trials with theory comparison");
    c_sim->add_option("--d", d)->required()->check(CLI::Range(3, 64));
    c_sim->add_option("--alpha", alpha)->required()->check(CLI::PositiveNumber);
    c_sim->add_option("--n", n)->required();
    c_sim->add_option("--trials", trials)->default_val(20)
        ->check(CLI::PositiveNumber);
    c_sim->add_option("--seed", seed)->default_val(1)->envname("KSMATCH_SEED");
    c_sim->add_option("--parallelism", parallelism, "Worker threads for trials")
        ->default_val(1)
        ->check(CLI::PositiveNumber);
    add_common(c_sim, sim_opts);

    auto* c_sweep = app.add_subcommand(
        "sweep", "Experiments across an alpha grid");
    c_sweep->add_option("--d", d)->required()->check(CLI::Range(3, 64));
    c_sweep->add_option("--alpha-min", alpha_min)->required()
        ->check(CLI::PositiveNumber);
    c_sweep->add_option("--alpha-max", alpha_max)->required()
        ->check(CLI::PositiveNumber);
    c_sweep->add_option("--steps", steps)->required()->check(CLI::PositiveNumber);
    c_sweep->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    c_sweep->add_option("--trials", trials)->default_val(10)
        ->check(CLI::PositiveNumber);
    c_sweep->add_option("--seed", seed)->default_val(1)->envname("KSMATCH_SEED");
    c_sweep->add_option("--parallelism", parallelism)->default_val(1)
        ->check(CLI::PositiveNumber);
    add_common(c_sweep, sweep_opts);

    auto* c_core = app.add_subcommand(
        "core-check", "Perfect-matching frequency of sampled core graphs");
    c_core->add_option("--d", d)->required()->check(CLI::Range(3, 64));
    c_core->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    c_core->add_option("--m", m)->required()->check(CLI::PositiveNumber);
    c_core->add_option("--trials", trials)->default_val(100)
        ->check(CLI::PositiveNumber);
    c_core->add_option("--seed", seed)->default_val(1)->envname("KSMATCH_SEED");
    add_common(c_core, core_opts);

    auto* c_self = app.add_subcommand(
        "self-check", "Analytic property grid (concavity, convexity, bounds)");
    add_common(c_self, self_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_thresholds->parsed()) return cmd_thresholds(d, thresholds_opts);
        if (c_predict->parsed()) return cmd_predict(d, alpha, n, predict_opts);
        if (c_traj->parsed()) return cmd_trajectory(d, alpha, n, points, traj_opts);
        if (c_sim->parsed())
            return cmd_simulate(d, alpha, n, trials, seed, parallelism, sim_opts);
        if (c_sweep->parsed())
            return cmd_sweep(d, alpha_min, alpha_max, steps, n, trials, seed,
                             parallelism, sweep_opts);
        if (c_core->parsed())
            return cmd_core_check(d, n, m, trials, seed, core_opts);
        if (c_self->parsed()) return cmd_self_check(self_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
