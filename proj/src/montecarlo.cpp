#include "ksmatch/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ksmatch {

namespace {

void append_double(std::ostringstream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs, double mean) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

} // namespace

bool ExperimentReport::operator==(const ExperimentReport& other) const {
    return params.n == other.params.n && params.m == other.params.m &&
           params.d == other.params.d && params.seed == other.params.seed &&
           trials == other.trials && results == other.results &&
           predicted.d == other.predicted.d &&
           predicted.alpha == other.predicted.alpha &&
           predicted.z1 == other.predicted.z1 &&
           predicted.alpha1 == other.predicted.alpha1 &&
           predicted.z_star == other.predicted.z_star &&
           predicted.tau1_fraction == other.predicted.tau1_fraction &&
           predicted.mu_gamma1_fraction_of_m == other.predicted.mu_gamma1_fraction_of_m &&
           predicted.mu_fraction_of_n == other.predicted.mu_fraction_of_n &&
           aggregates == other.aggregates;
}

TrialResult run_trial(const ModelParams& params, std::int64_t trial_index) {
    params.validate();
    TrialResult tr;
    tr.trial_index = trial_index;
    tr.seed = mix_seed(params.seed, static_cast<std::uint64_t>(trial_index));
    if (params.n == 0) {
        tr.trace.emplace_back(0, DegreeState{});
        return tr;
    }

    Rng rng(tr.seed);
    BipartiteGraph g = sample_graph(params, rng);
    tr.mu = max_matching(g).size();

    KSResult ks = karp_sipser_phase1(g, rng);
    tr.tau1 = ks.tau1;
    tr.core_left = ks.core_left;
    tr.core_right = ks.core_right;
    tr.mu_gamma1 = max_matching(g).size(); // g is now the core
    karp_sipser_phase2(g, rng, ks);
    tr.ks_size = ks.matching.size();
    tr.perfect_left = tr.mu == params.n;
    tr.trace = std::move(ks.trace);

    if (params.d >= 3) {
        for (const auto& [t, st] : tr.trace) {
            const TrajectoryPoint fl = fluid_at_step(params.d, params.n, params.m,
                                                     static_cast<double>(t));
            const double dm = static_cast<double>(params.m);
            tr.max_dev_v1 = std::max(tr.max_dev_v1, std::abs(st.v1 - fl.y1) / dm);
            tr.max_dev_v = std::max(tr.max_dev_v, std::abs(st.v - fl.y) / dm);
        }
    }
    return tr;
}

ExperimentReport run_experiment(const ModelParams& params, std::int64_t trials,
                                int parallelism) {
    params.validate();
    if (params.d < 3) {
        throw std::invalid_argument("run_experiment requires d >= 3");
    }
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");

    ExperimentReport report;
    report.params = params;
    report.trials = trials;
    report.results.resize(trials);

    bool ran_parallel = false;
#ifdef _OPENMP
    if (parallelism > 1) {
        ran_parallel = true;
#pragma omp parallel for schedule(dynamic) num_threads(parallelism)
        for (std::int64_t i = 0; i < trials; ++i) {
            report.results[i] = run_trial(params, i);
        }
    }
#else
    (void)parallelism;
#endif
    if (!ran_parallel) {
        // serial reference path; the parallel loop must match it exactly
        for (std::int64_t i = 0; i < trials; ++i) {
            report.results[i] = run_trial(params, i);
        }
    }

    std::vector<double> tau1_frac, mu_frac;
    tau1_frac.reserve(trials);
    mu_frac.reserve(trials);
    const double dn = static_cast<double>(params.n);
    std::int64_t perfect = 0;
    for (const auto& tr : report.results) {
        tau1_frac.push_back(params.n > 0 ? tr.tau1 / dn : 0.0);
        mu_frac.push_back(params.n > 0 ? tr.mu / dn : 0.0);
        perfect += tr.perfect_left ? 1 : 0;
        report.aggregates.max_dev_v1 =
            std::max(report.aggregates.max_dev_v1, tr.max_dev_v1);
        report.aggregates.max_dev_v =
            std::max(report.aggregates.max_dev_v, tr.max_dev_v);
    }
    auto& agg = report.aggregates;
    agg.tau1_fraction_mean = mean_of(tau1_frac);
    agg.tau1_fraction_stddev = stddev_of(tau1_frac, agg.tau1_fraction_mean);
    agg.mu_fraction_mean = mean_of(mu_frac);
    agg.mu_fraction_stddev = stddev_of(mu_frac, agg.mu_fraction_mean);
    agg.fraction_perfect = static_cast<double>(perfect) / static_cast<double>(trials);

    if (params.n > 0) {
        report.predicted = predict(params.alpha(), params.d, params.n, params.m);
    }
    return report;
}

SweepTable sweep_alpha(int d, double alpha_min, double alpha_max, int steps,
                       std::int64_t n, std::int64_t trials, std::uint64_t seed,
                       int parallelism) {
    if (steps < 1) throw std::invalid_argument("steps must be at least 1");
    if (steps > 1 && !(alpha_min < alpha_max)) {
        throw std::invalid_argument("alpha_min must be below alpha_max");
    }
    SweepTable table;
    for (int i = 0; i < steps; ++i) {
        const double alpha =
            steps == 1 ? alpha_min
                       : alpha_min + (alpha_max - alpha_min) * i / (steps - 1);
        ModelParams params;
        params.n = n;
        params.m = std::llround(static_cast<double>(n) / alpha);
        params.d = d;
        params.seed = mix_seed(seed, static_cast<std::uint64_t>(i));
        const ExperimentReport rep = run_experiment(params, trials, parallelism);

        SweepRow row;
        row.alpha = alpha;
        row.n = n;
        row.m = params.m;
        row.d = d;
        row.trials = trials;
        std::int64_t tau_full = 0, mu_perfect = 0;
        for (const auto& tr : rep.results) {
            tau_full += tr.tau1 == n ? 1 : 0;
            mu_perfect += tr.perfect_left ? 1 : 0;
        }
        row.frac_tau1_full = static_cast<double>(tau_full) / trials;
        row.frac_mu_perfect = static_cast<double>(mu_perfect) / trials;
        row.mean_mu_fraction = rep.aggregates.mu_fraction_mean;
        row.pred_tau1_fraction = rep.predicted.tau1_fraction;
        row.pred_mu_fraction = rep.predicted.mu_fraction_of_n;
        row.pred_z_star = rep.predicted.z_star;
        row.pred_alpha1 = rep.predicted.alpha1;
        table.rows.push_back(row);
    }
    return table;
}

ExportFormat parse_format(const std::string& name) {
    if (name == "csv") return ExportFormat::csv;
    if (name == "json") return ExportFormat::json;
    throw std::invalid_argument("unknown format: " + name);
}

namespace {

using nlohmann::json;

json threshold_to_json(const ThresholdReport& t) {
    return json{{"d", t.d},
                {"alpha", t.alpha},
                {"z1", t.z1},
                {"alpha1", t.alpha1},
                {"z_star", t.z_star},
                {"tau1_fraction", t.tau1_fraction},
                {"mu_gamma1_fraction_of_m", t.mu_gamma1_fraction_of_m},
                {"mu_fraction_of_n", t.mu_fraction_of_n}};
}

ThresholdReport threshold_from_json(const json& j) {
    ThresholdReport t;
    t.d = j.at("d").get<int>();
    t.alpha = j.at("alpha").get<double>();
    t.z1 = j.at("z1").get<double>();
    t.alpha1 = j.at("alpha1").get<double>();
    t.z_star = j.at("z_star").get<double>();
    t.tau1_fraction = j.at("tau1_fraction").get<double>();
    t.mu_gamma1_fraction_of_m = j.at("mu_gamma1_fraction_of_m").get<double>();
    t.mu_fraction_of_n = j.at("mu_fraction_of_n").get<double>();
    return t;
}

} // namespace

std::string export_report(const ExperimentReport& report, ExportFormat format) {
    if (format == ExportFormat::csv) {
        std::ostringstream out;
        out << "trial_index,seed,n,m,d,alpha,tau1,mu,ks_size,perfect_L,"
               "core_L1,core_R1\n";
        for (const auto& tr : report.results) {
            out << tr.trial_index << ',' << tr.seed << ',' << report.params.n
                << ',' << report.params.m << ',' << report.params.d << ',';
            append_double(out, report.params.alpha());
            out << ',' << tr.tau1 << ',' << tr.mu << ',' << tr.ks_size << ','
                << (tr.perfect_left ? 1 : 0) << ',' << tr.core_left << ','
                << tr.core_right << '\n';
        }
        return out.str();
    }

    json trials = json::array();
    for (const auto& tr : report.results) {
        json trace = json::array();
        for (const auto& [t, st] : tr.trace) {
            trace.push_back(json::array({t, st.w, st.v1, st.v}));
        }
        trials.push_back(json{{"trial_index", tr.trial_index},
                              {"seed", tr.seed},
                              {"tau1", tr.tau1},
                              {"mu", tr.mu},
                              {"mu_gamma1", tr.mu_gamma1},
                              {"ks_size", tr.ks_size},
                              {"perfect_L", tr.perfect_left},
                              {"core_L1", tr.core_left},
                              {"core_R1", tr.core_right},
                              {"max_dev_v1", tr.max_dev_v1},
                              {"max_dev_v", tr.max_dev_v},
                              {"trace", std::move(trace)}});
    }
    const auto& agg = report.aggregates;
    json doc{{"schema_version", "v1"},
             {"params",
              {{"n", report.params.n},
               {"m", report.params.m},
               {"d", report.params.d},
               {"seed", report.params.seed},
               {"alpha", report.params.alpha()}}},
             {"trials", report.trials},
             {"results", std::move(trials)},
             {"predicted", threshold_to_json(report.predicted)},
             {"aggregates",
              {{"tau1_fraction_mean", agg.tau1_fraction_mean},
               {"tau1_fraction_stddev", agg.tau1_fraction_stddev},
               {"mu_fraction_mean", agg.mu_fraction_mean},
               {"mu_fraction_stddev", agg.mu_fraction_stddev},
               {"fraction_perfect", agg.fraction_perfect},
               {"max_dev_v1", agg.max_dev_v1},
               {"max_dev_v", agg.max_dev_v}}}};
    return doc.dump(2) + "\n";
}

ExperimentReport parse_report_json(const std::string& text) {
    const json doc = json::parse(text);
    if (doc.at("schema_version").get<std::string>() != "v1") {
        throw std::invalid_argument("unsupported schema version");
    }
    ExperimentReport report;
    const auto& p = doc.at("params");
    report.params.n = p.at("n").get<std::int64_t>();
    report.params.m = p.at("m").get<std::int64_t>();
    report.params.d = p.at("d").get<int>();
    report.params.seed = p.at("seed").get<std::uint64_t>();
    report.trials = doc.at("trials").get<std::int64_t>();
    for (const auto& jt : doc.at("results")) {
        TrialResult tr;
        tr.trial_index = jt.at("trial_index").get<std::int64_t>();
        tr.seed = jt.at("seed").get<std::uint64_t>();
        tr.tau1 = jt.at("tau1").get<std::int64_t>();
        tr.mu = jt.at("mu").get<std::int64_t>();
        tr.mu_gamma1 = jt.at("mu_gamma1").get<std::int64_t>();
        tr.ks_size = jt.at("ks_size").get<std::int64_t>();
        tr.perfect_left = jt.at("perfect_L").get<bool>();
        tr.core_left = jt.at("core_L1").get<std::int64_t>();
        tr.core_right = jt.at("core_R1").get<std::int64_t>();
        tr.max_dev_v1 = jt.at("max_dev_v1").get<double>();
        tr.max_dev_v = jt.at("max_dev_v").get<double>();
        for (const auto& entry : jt.at("trace")) {
            DegreeState st;
            st.w = entry.at(1).get<std::int64_t>();
            st.v1 = entry.at(2).get<std::int64_t>();
            st.v = entry.at(3).get<std::int64_t>();
            tr.trace.emplace_back(entry.at(0).get<std::int64_t>(), st);
        }
        report.results.push_back(std::move(tr));
    }
    report.predicted = threshold_from_json(doc.at("predicted"));
    const auto& ja = doc.at("aggregates");
    auto& agg = report.aggregates;
    agg.tau1_fraction_mean = ja.at("tau1_fraction_mean").get<double>();
    agg.tau1_fraction_stddev = ja.at("tau1_fraction_stddev").get<double>();
    agg.mu_fraction_mean = ja.at("mu_fraction_mean").get<double>();
    agg.mu_fraction_stddev = ja.at("mu_fraction_stddev").get<double>();
    agg.fraction_perfect = ja.at("fraction_perfect").get<double>();
    agg.max_dev_v1 = ja.at("max_dev_v1").get<double>();
    agg.max_dev_v = ja.at("max_dev_v").get<double>();
    return report;
}

std::string export_sweep(const SweepTable& table, ExportFormat format) {
    if (format == ExportFormat::csv) {
        std::ostringstream out;
        out << "alpha,n,m,d,trials,frac_tau1_full,frac_mu_perfect,"
               "mean_mu_fraction,pred_tau1_fraction,pred_mu_fraction,"
               "pred_z_star,pred_alpha1\n";
        for (const auto& r : table.rows) {
            append_double(out, r.alpha);
            out << ',' << r.n << ',' << r.m << ',' << r.d << ',' << r.trials << ',';
            append_double(out, r.frac_tau1_full);
            out << ',';
            append_double(out, r.frac_mu_perfect);
            out << ',';
            append_double(out, r.mean_mu_fraction);
            out << ',';
            append_double(out, r.pred_tau1_fraction);
            out << ',';
            append_double(out, r.pred_mu_fraction);
            out << ',';
            append_double(out, r.pred_z_star);
            out << ',';
            append_double(out, r.pred_alpha1);
            out << '\n';
        }
        return out.str();
    }
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back(json{{"alpha", r.alpha},
                            {"n", r.n},
                            {"m", r.m},
                            {"d", r.d},
                            {"trials", r.trials},
                            {"frac_tau1_full", r.frac_tau1_full},
                            {"frac_mu_perfect", r.frac_mu_perfect},
                            {"mean_mu_fraction", r.mean_mu_fraction},
                            {"pred_tau1_fraction", r.pred_tau1_fraction},
                            {"pred_mu_fraction", r.pred_mu_fraction},
                            {"pred_z_star", r.pred_z_star},
                            {"pred_alpha1", r.pred_alpha1}});
    }
    json doc{{"schema_version", "v1"}, {"rows", std::move(rows)}};
    return doc.dump(2) + "\n";
}

} // namespace ksmatch
