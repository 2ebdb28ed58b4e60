#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksmatch/analysis.hpp"
#include "ksmatch/matching.hpp"
#include "ksmatch/model.hpp"

// Seeded experiment harness. Trials are pure functions of
// (params, trial_index): every trial derives its own generator from a
// stateless seed mix, so the OpenMP trial loop and the serial reference
// loop produce bit-identical reports.

namespace ksmatch {

struct TrialResult {
    std::int64_t trial_index = 0;
    std::uint64_t seed = 0; // derived per-trial seed
    std::int64_t tau1 = 0;
    std::int64_t mu = 0;        // exact maximum matching of G
    std::int64_t mu_gamma1 = 0; // exact maximum matching of the Phase-1 core
    std::int64_t ks_size = 0;   // full greedy result
    bool perfect_left = false;  // mu == n
    std::int64_t core_left = 0;
    std::int64_t core_right = 0;
    std::vector<std::pair<std::int64_t, DegreeState>> trace;
    double max_dev_v1 = 0.0; // max over checkpoints of |v1 - y1|/m
    double max_dev_v = 0.0;  // max over checkpoints of |v - y|/m

    bool operator==(const TrialResult&) const = default;
};

struct Aggregates {
    double tau1_fraction_mean = 0.0;
    double tau1_fraction_stddev = 0.0; // population convention
    double mu_fraction_mean = 0.0;
    double mu_fraction_stddev = 0.0;
    double fraction_perfect = 0.0;
    double max_dev_v1 = 0.0; // worst trial
    double max_dev_v = 0.0;

    bool operator==(const Aggregates&) const = default;
};

struct ExperimentReport {
    ModelParams params;
    std::int64_t trials = 0;
    std::vector<TrialResult> results;
    ThresholdReport predicted;
    Aggregates aggregates;

    bool operator==(const ExperimentReport&) const;
};

/// One simulated trial: sample, exact matching of G, Phase 1 with
/// checkpoints, exact matching of the core, Phase 2 continuation, fluid
/// deviation. Deterministic given (params, trial_index).
TrialResult run_trial(const ModelParams& params, std::int64_t trial_index);

/// Runs `trials` independent trials (OpenMP across trials when
/// parallelism > 1) and folds them in index order. The report does not
/// depend on the parallelism setting. Requires d >= 3.
ExperimentReport run_experiment(const ModelParams& params, std::int64_t trials,
                                int parallelism = 1);

struct SweepRow {
    double alpha = 0.0; // requested ratio; m = round(n/alpha)
    std::int64_t n = 0;
    std::int64_t m = 0;
    int d = 0;
    std::int64_t trials = 0;
    double frac_tau1_full = 0.0; // trials with tau1 == n
    double frac_mu_perfect = 0.0;
    double mean_mu_fraction = 0.0;
    double pred_tau1_fraction = 0.0;
    double pred_mu_fraction = 0.0;
    double pred_z_star = 0.0;
    double pred_alpha1 = 0.0;

    bool operator==(const SweepRow&) const = default;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

/// One experiment per alpha grid point (steps points across
/// [alpha_min, alpha_max]; steps == 1 uses alpha_min alone).
SweepTable sweep_alpha(int d, double alpha_min, double alpha_max, int steps,
                       std::int64_t n, std::int64_t trials, std::uint64_t seed,
                       int parallelism = 1);

enum class ExportFormat { csv, json };
ExportFormat parse_format(const std::string& name); // throws on unknown

/// CSV: header + one row per trial. JSON: schema-versioned object carrying
/// params, the per-trial array (traces included) and aggregates; parses
/// back to an equal report.
std::string export_report(const ExperimentReport& report, ExportFormat format);
ExperimentReport parse_report_json(const std::string& text);

std::string export_sweep(const SweepTable& table, ExportFormat format);

} // namespace ksmatch
