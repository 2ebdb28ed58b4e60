#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

// Closed-form and root-finding mathematics for the allocation-graph model:
// the Phase-1 sufficiency threshold (z1, alpha1), the largest root z*
// controlling the supercritical regime, the fluid-limit trajectory of the
// peeling process, and the zeta/g/H special functions with their analytic
// property checks. All functions here are pure.

namespace ksmatch {

/// f(z) = e^z - z - 1, with a series branch near zero to avoid cancellation.
double f_func(double z);

/// Unique positive root of z*(d-1) = e^z - 1. Requires d >= 3.
double solve_z1(int d);

/// Phase-1 sufficiency threshold alpha1 = z1 / (d*(1-e^{-z1})^{d-1}).
double compute_alpha1(int d);

/// Largest nonnegative root of (z/(alpha*d))^{1/(d-1)} + e^{-z} - 1 = 0 on
/// (0, alpha*d]; returns 0 when no positive root exists (alpha <= alpha1).
/// The defining function has at most two positive roots, so a sign scan
/// over a fine grid cannot skip the largest one.
double solve_z_star(double alpha, int d);

/// Unique u >= 0 with u*(e^u - 1)/f(u) = gamma. Requires gamma >= 2;
/// gamma = 2 maps to the limit 0. Throws std::domain_error below 2.
double zeta_of_ratio(double gamma);

/// g(x) = (e^{zeta(x)} - 1)^x * f(zeta(x))^{1-x} for x >= 2; g(2) = 2 (limit).
double g_func(double x);

/// H(u) = log f(u) - u - 2*log u for u > 0.
double H_func(double u);

struct ThresholdReport {
    int d = 0;
    double alpha = 0.0;
    double z1 = 0.0;
    double alpha1 = 0.0;
    double z_star = 0.0;
    double tau1_fraction = 0.0;           // predicted tau1 / n
    double mu_gamma1_fraction_of_m = 0.0; // predicted mu(Gamma1) / m
    double mu_fraction_of_n = 0.0;        // predicted mu(G) / n
};

/// Predicted Phase-1 coverage and maximum-matching size at ratio alpha = n/m.
/// Below the threshold Phase 1 matches everything; above it the fractions
/// come from z*: tau1/n = 1 - (z*/(alpha d))^{d/(d-1)} and
/// mu(Gamma1) = min{ n - tau1, (1-(1+z*)e^{-z*}) m }.
ThresholdReport predict(double alpha, int d, std::int64_t n, std::int64_t m);

struct TrajectoryPoint {
    double t = 0.0;    // peeling step count (fluid, may be fractional)
    double zeta = 0.0; // fluid parameter, decreasing as t grows
    double w = 0.0;    // live left vertices
    double y1 = 0.0;   // right vertices of degree exactly one
    double y = 0.0;    // right vertices of degree at least two
};

/// Closed-form fluid trajectory evaluated on a zeta grid (each value must lie
/// in (0, alpha*d] where alpha = n/m). Points are returned in increasing t.
///   w  = (zeta/(alpha d))^{d/(d-1)} n        t = n - w
///   y  = e^{-zeta} f(zeta) m
///   y1 = m zeta ((zeta/(alpha d))^{1/(d-1)} + e^{-zeta} - 1)
std::vector<TrajectoryPoint> trajectory(int d, std::int64_t n, std::int64_t m,
                                        std::span<const double> zeta_grid);

/// Fluid state at integer step t of the peeling process (t in [0, n]).
TrajectoryPoint fluid_at_step(int d, std::int64_t n, std::int64_t m, double t);

/// Evenly spaced zeta grid over (0, alpha*d], largest first, `points` values.
std::vector<double> default_zeta_grid(int d, std::int64_t n, std::int64_t m,
                                      int points);

struct PropertyCheck {
    std::string name;
    bool pass = false;
    double worst = 0.0; // most adverse value observed on the grid
};

/// Analytic property grid: log-concavity of g, concavity of zeta, convexity
/// of H, the f(zeta(y))/zeta(y)^y <= 3/4 bound, zeta(x) >= x-2, and the
/// trajectory consistency identity. Used by the CLI self-check.
std::vector<PropertyCheck> run_self_check();

} // namespace ksmatch
