#include "ksmatch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ksmatch {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kThresholdTol = 1e-9;

void require_degree(int d) {
    if (d < 3) throw std::domain_error("degree must be at least 3");
}

// Bisect a bracketed sign change down to machine resolution and return the
// endpoint with the smaller |residual|.
template <typename F>
double bisect(F&& fn, double lo, double hi) {
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) throw std::logic_error("root not bracketed");
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fmid = fn(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

// u*(e^u-1)/f(u): the mean-degree ratio of the conditioned Poisson. Series
// branch keeps it smooth through the removable singularity at 0, where the
// value tends to 2 with slope 1/3.
double degree_ratio(double u) {
    if (u < 1e-4) {
        const double num = 1.0 + u / 2.0 + u * u / 6.0 + u * u * u / 24.0;
        const double den = 1.0 + u / 3.0 + u * u / 12.0 + u * u * u / 60.0;
        return 2.0 * num / den;
    }
    return u * std::expm1(u) / f_func(u);
}

} // namespace

double f_func(double z) {
    if (z < 0.0) throw std::domain_error("f_func requires z >= 0");
    if (z < 1e-4) {
        return 0.5 * z * z * (1.0 + z / 3.0 + z * z / 12.0 + z * z * z / 60.0);
    }
    return std::expm1(z) - z;
}

double solve_z1(int d) {
    require_degree(d);
    // phi(z) = z(d-1) - (e^z - 1) is positive just right of 0 and eventually
    // negative; the sign change brackets the unique positive root.
    const auto phi = [d](double z) { return z * (d - 1) - std::expm1(z); };
    double hi = 4.0 * std::log(static_cast<double>(d)) + 4.0;
    double z = bisect(phi, 1e-9, hi);
    // Newton polish; derivative (d-1) - e^z.
    for (int i = 0; i < 4; ++i) {
        const double deriv = (d - 1) - std::exp(z);
        const double step = phi(z) / deriv;
        if (!std::isfinite(step)) break;
        z -= step;
    }
    return z;
}

double compute_alpha1(int d) {
    const double z1 = solve_z1(d);
    return z1 / (d * std::pow(-std::expm1(-z1), d - 1));
}

double solve_z_star(double alpha, int d) {
    require_degree(d);
    if (!(alpha > 0.0)) throw std::domain_error("alpha must be positive");
    const double ad = alpha * d;
    const double inv = 1.0 / (d - 1);
    const auto phi = [ad, inv](double z) {
        return std::pow(z / ad, inv) + std::exp(-z) - 1.0;
    };
    // Scan (0, ad] for sign changes; at most two positive roots exist, so the
    // last bracketed change on this grid contains the largest root.
    constexpr int kGrid = 10000;
    double best = 0.0;
    double prev_z = ad / kGrid;
    double prev_v = phi(prev_z);
    for (int i = 2; i <= kGrid; ++i) {
        const double z = ad * i / kGrid;
        const double v = phi(z);
        if (v == 0.0) {
            best = z;
        } else if ((prev_v < 0.0) != (v < 0.0)) {
            best = bisect(phi, prev_z, z);
        }
        prev_z = z;
        prev_v = v;
    }
    return best;
}

double zeta_of_ratio(double gamma) {
    if (gamma < 2.0) throw std::domain_error("zeta_of_ratio requires gamma >= 2");
    if (gamma == 2.0) return 0.0;
    const auto fn = [gamma](double u) { return degree_ratio(u) - gamma; };
    // The ratio exceeds u everywhere, so [tiny, gamma] brackets the root.
    double lo = 1e-300;
    double hi = gamma;
    while (fn(hi) < 0.0) hi *= 2.0; // safety, not expected to trigger
    return bisect(fn, lo, hi);
}

double g_func(double x) {
    if (x < 2.0) throw std::domain_error("g_func requires x >= 2");
    if (x == 2.0) return 2.0;
    const double zeta = zeta_of_ratio(x);
    // log-space evaluation: x*log(e^z-1) + (1-x)*log f(z). Both logs are
    // stable: expm1 near 0 and the series branch of f.
    const double log_em1 = std::log(std::expm1(zeta));
    const double log_f = std::log(f_func(zeta));
    return std::exp(x * log_em1 + (1.0 - x) * log_f);
}

double H_func(double u) {
    if (!(u > 0.0)) throw std::domain_error("H_func requires u > 0");
    return std::log(f_func(u)) - u - 2.0 * std::log(u);
}

ThresholdReport predict(double alpha, int d, std::int64_t n, std::int64_t m) {
    require_degree(d);
    if (!(alpha > 0.0)) throw std::domain_error("alpha must be positive");
    if (n > 0 && m > 0 && std::abs(alpha * m - n) > 1.0 + 1e-6 * m) {
        throw std::invalid_argument("alpha inconsistent with n/m");
    }
    ThresholdReport r;
    r.d = d;
    r.alpha = alpha;
    r.z1 = solve_z1(d);
    r.alpha1 = compute_alpha1(d);
    if (alpha <= r.alpha1 + kThresholdTol) {
        r.z_star = 0.0;
        r.tau1_fraction = 1.0;
        r.mu_gamma1_fraction_of_m = 0.0;
        r.mu_fraction_of_n = 1.0;
        return r;
    }
    const double ad = alpha * d;
    r.z_star = solve_z_star(alpha, d);
    r.tau1_fraction =
        1.0 - std::pow(r.z_star / ad, static_cast<double>(d) / (d - 1));
    const double left_core_of_m = (1.0 - r.tau1_fraction) * alpha; // |L1|/m
    const double right_core_of_m = 1.0 - (1.0 + r.z_star) * std::exp(-r.z_star);
    r.mu_gamma1_fraction_of_m = std::min(left_core_of_m, right_core_of_m);
    r.mu_fraction_of_n = r.tau1_fraction + r.mu_gamma1_fraction_of_m / alpha;
    return r;
}

std::vector<TrajectoryPoint> trajectory(int d, std::int64_t n, std::int64_t m,
                                        std::span<const double> zeta_grid) {
    require_degree(d);
    if (m < 1) throw std::domain_error("m must be positive");
    const double alpha = static_cast<double>(n) / static_cast<double>(m);
    const double ad = alpha * d;
    std::vector<TrajectoryPoint> out;
    out.reserve(zeta_grid.size());
    for (double zeta : zeta_grid) {
        if (!(zeta > 0.0) || zeta > ad * (1.0 + 1e-12)) {
            throw std::domain_error("zeta grid point outside (0, alpha*d]");
        }
        zeta = std::min(zeta, ad);
        TrajectoryPoint p;
        p.zeta = zeta;
        const double ratio = zeta / ad;
        p.w = std::pow(ratio, static_cast<double>(d) / (d - 1)) * n;
        p.t = n - p.w;
        p.y = std::exp(-zeta) * f_func(zeta) * m;
        p.y1 = m * zeta * (std::pow(ratio, 1.0 / (d - 1)) + std::exp(-zeta) - 1.0);
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(),
              [](const TrajectoryPoint& a, const TrajectoryPoint& b) {
                  return a.t < b.t;
              });
    return out;
}

TrajectoryPoint fluid_at_step(int d, std::int64_t n, std::int64_t m, double t) {
    require_degree(d);
    if (m < 1 || n < 1) throw std::domain_error("n and m must be positive");
    if (t < 0.0 || t > static_cast<double>(n)) {
        throw std::domain_error("step outside [0, n]");
    }
    const double alpha = static_cast<double>(n) / static_cast<double>(m);
    const double ad = alpha * d;
    TrajectoryPoint p;
    p.t = t;
    const double wfrac = 1.0 - t / static_cast<double>(n);
    p.w = wfrac * n;
    p.zeta = ad * std::pow(wfrac, static_cast<double>(d - 1) / d);
    if (p.zeta <= 0.0) {
        p.y = 0.0;
        p.y1 = 0.0;
        return p;
    }
    p.y = std::exp(-p.zeta) * f_func(p.zeta) * m;
    p.y1 = m * p.zeta *
           (std::pow(p.zeta / ad, 1.0 / (d - 1)) + std::exp(-p.zeta) - 1.0);
    return p;
}

std::vector<double> default_zeta_grid(int d, std::int64_t n, std::int64_t m,
                                      int points) {
    require_degree(d);
    if (points < 1) throw std::domain_error("points must be positive");
    const double ad = static_cast<double>(n) / static_cast<double>(m) * d;
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = ad * (points - i) / points;
    }
    return grid;
}

namespace {

// Largest second difference of fn over [lo, hi] with the given step.
template <typename F>
double max_second_difference(F&& fn, double lo, double hi, double step) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double x = lo; x + 2.0 * step <= hi + 1e-12; x += step) {
        const double d2 = fn(x + 2.0 * step) - 2.0 * fn(x + step) + fn(x);
        worst = std::max(worst, d2);
    }
    return worst;
}

} // namespace

std::vector<PropertyCheck> run_self_check() {
    std::vector<PropertyCheck> checks;

    {
        PropertyCheck c{"log_g_concave", false, 0.0};
        c.worst = max_second_difference(
            [](double x) { return std::log(g_func(x)); }, 2.01, 8.0, 0.01);
        c.pass = c.worst <= 1e-9;
        checks.push_back(c);
    }
    {
        PropertyCheck c{"zeta_concave", false, 0.0};
        c.worst = max_second_difference(
            [](double x) { return zeta_of_ratio(x); }, 2.01, 8.0, 0.01);
        c.pass = c.worst <= 1e-9;
        checks.push_back(c);
    }
    {
        PropertyCheck c{"H_convex", false, 0.0};
        // Convexity: second difference must stay positive.
        double worst = std::numeric_limits<double>::infinity();
        for (double u = 0.1; u + 0.1 <= 10.0 + 1e-12; u += 0.05) {
            const double d2 = H_func(u + 0.1) - 2.0 * H_func(u + 0.05) + H_func(u);
            worst = std::min(worst, d2);
        }
        c.worst = worst;
        c.pass = worst > 0.0;
        checks.push_back(c);
    }
    {
        PropertyCheck c{"f_zeta_bound", false, 0.0};
        double worst = 0.0;
        for (double y = 2.01; y <= 10.0 + 1e-12; y += 0.01) {
            const double z = zeta_of_ratio(y);
            const double v = f_func(z) / std::pow(z, y);
            worst = std::max(worst, v);
        }
        c.worst = worst;
        c.pass = worst <= 0.75;
        checks.push_back(c);
    }
    {
        PropertyCheck c{"zeta_linear_lower_bound", false, 0.0};
        double worst = std::numeric_limits<double>::infinity();
        for (double x = 2.01; x <= 8.0 + 1e-12; x += 0.01) {
            worst = std::min(worst, zeta_of_ratio(x) - (x - 2.0));
        }
        c.worst = worst;
        c.pass = worst >= 0.0;
        checks.push_back(c);
    }
    {
        // Consistency identity (d*w - y1)/y = zeta*(e^zeta - 1)/f(zeta) on a
        // 100-point trajectory.
        PropertyCheck c{"trajectory_identity", false, 0.0};
        const int d = 3;
        const std::int64_t n = 90000, m = 100000;
        const auto grid = default_zeta_grid(d, n, m, 100);
        double worst = 0.0;
        for (const auto& p : trajectory(d, n, m, grid)) {
            const double lhs = (d * p.w - p.y1) / p.y;
            const double rhs = degree_ratio(p.zeta);
            worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
        c.worst = worst;
        c.pass = worst <= 1e-9;
        checks.push_back(c);
    }
    return checks;
}

} // namespace ksmatch
