#include "hkgf/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hkgf/errors.hpp"
#include "hkgf/gauss.hpp"

namespace hkgf {

DissipationSplit dissipation_split(double alpha, double beta, const MatrixXd& sigma,
                                   const VectorXd& m, const GaussianTarget& target) {
    DissipationSplit out;
    const int d = static_cast<int>(sigma.rows());
    MatrixXd N = symmetrize(target.gamma_inv - inverse_spd(sigma));
    MatrixXd B = symmetrize(target.gamma_inv_sqrt * sigma * target.gamma_inv_sqrt);
    out.d_cov = alpha * trace_nsn(N, sigma) +
                0.5 * beta * (B - MatrixXd::Identity(d, d)).squaredNorm();
    VectorXd u = target.gamma_inv * (m - target.n);
    out.d_mean = alpha * u.squaredNorm() + beta * u.dot(sigma * u);
    return out;
}

double h_ratio_cov(double y) {
    if (!(y > 0.0)) throw DomainError("h_ratio_cov: argument must be positive");
    if (std::isinf(y)) return 1.0;
    double x = y - 1.0;
    if (std::abs(x) < 1e-5) {
        // zeta/phi = (1/y) / (1/2 - x/3 + x^2/4 - ...)
        return (1.0 / y) / (0.5 + x * (-1.0 / 3.0 + x * (0.25 - x / 5.0)));
    }
    return zeta_phi(y) / phi_entropy(y);
}

double h_ratio_mass(double y) {
    if (y == 0.0) return 0.0;
    if (!(y > 0.0)) throw DomainError("h_ratio_mass: argument must be positive");
    return y * h_ratio_cov(y);
}

double H_aux(double delta, double beta, double y) {
    return delta * h_ratio_cov(y) + beta * h_ratio_mass(y);
}

double h_inf(double delta, double beta, Interval J) {
    if (delta < 0.0 || beta < 0.0) throw DomainError("h_inf: weights must be nonnegative");
    if (!(J.lo >= 0.0) || !(J.hi > J.lo))
        throw DomainError("h_inf: empty or invalid interval");
    if (delta == 0.0 && beta == 0.0) return 0.0;
    if (beta == 0.0) return delta * h_ratio_cov(J.hi);   // decreasing factor
    if (delta == 0.0) return beta * h_ratio_mass(J.lo);  // increasing factor

    // Both weights positive: H tends to +inf at both open ends of (0, inf),
    // so a log-grid scan over the (clipped) interval brackets the minimum.
    double lo = std::max(J.lo, 1e-12);
    double hi = std::isinf(J.hi) ? 1e12 : J.hi;
    const int n_grid = 600;
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i <= n_grid; ++i) {
        double y = std::exp(llo + (lhi - llo) * i / n_grid);
        double v = H_aux(delta, beta, y);
        if (v < best) {
            best = v;
            best_i = i;
        }
    }
    double a = std::exp(llo + (lhi - llo) * std::max(0, best_i - 1) / n_grid);
    double b = std::exp(llo + (lhi - llo) * std::min(n_grid, best_i + 1) / n_grid);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = H_aux(delta, beta, x1), f2 = H_aux(delta, beta, x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + b); ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a);
            f1 = H_aux(delta, beta, x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a);
            f2 = H_aux(delta, beta, x2);
        }
    }
    return std::min(best, std::min(f1, f2));
}

PlConstants pl_constants(double alpha, double beta, const GaussianTarget& target,
                         std::optional<double> E) {
    if (alpha < 0.0 || beta < 0.0) throw ConfigError("pl_constants: weights must be nonnegative");
    double alpha_gamma = alpha * min_eigenvalue_sym(target.gamma_inv);
    PlConstants out;
    if (!E) {
        out.c_mean = 2.0 * alpha_gamma;
        if (beta == 0.0)
            out.c_cov = 2.0 * alpha_gamma;
        else if (alpha_gamma == 0.0)
            out.c_cov = 0.0;
        else
            out.c_cov = h_inf(2.0 * alpha_gamma, beta, Interval{0.0, std::numeric_limits<double>::infinity()});
        return out;
    }
    if (!(*E > 0.0)) throw DomainError("pl_constants: sublevel E must be positive");
    double j_lo = std::exp(-(1.0 + 2.0 * *E));
    double j_hi = 1.0 + std::log(4.0) + 4.0 * *E;
    out.c_cov = 2.0 * alpha_gamma * h_ratio_cov(j_hi) + beta * h_ratio_mass(j_lo);
    out.c_mean = 2.0 * alpha_gamma + 2.0 * beta * j_lo;
    return out;
}

DecayRates refined_rates(double alpha, double beta, const GaussianTarget& target,
                         double b_min0) {
    if (alpha < 0.0 || beta < 0.0 || (alpha == 0.0 && beta == 0.0))
        throw ConfigError("refined_rates: need alpha, beta >= 0, not both zero");
    if (!(b_min0 > 0.0)) throw DomainError("refined_rates: b_min(0) must be positive");
    double nu_min = min_eigenvalue_sym(target.gamma_inv);
    DecayRates r;
    r.nu_cov = 2.0 * alpha * nu_min + beta;
    r.nu_mean = 2.0 * (alpha * nu_min + beta);
    double base = std::min(1.0, b_min0);
    r.prefactor_cov = std::pow(base, -beta / r.nu_cov);
    // the Gronwall chain for the mean picks up exp(2 beta Int (1 - b_min))
    // controlled through the *covariance* rate
    r.prefactor_mean = std::pow(base, -2.0 * beta / r.nu_cov);
    PlConstants pl = pl_constants(alpha, beta, target);
    r.c_pl_cov = pl.c_cov;
    r.c_pl_mean = pl.c_mean;
    return r;
}

namespace {

/// Least-squares slope of log(values) vs t over the tail half, ignoring
/// values at the floating-point floor.
double tail_log_slope(const std::vector<double>& t, const std::vector<double>& values) {
    const double floor = 1e2 * std::numeric_limits<double>::epsilon();
    std::size_t start = t.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = start; k < t.size(); ++k) {
        if (values[k] <= floor) continue;
        double x = t[k], y = std::log(values[k]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    double det = n * sxx - sx * sx;
    if (det == 0.0) return 0.0;
    return (n * sxy - sx * sy) / det;
}

} // namespace

DecayReport verify_decay(const Trajectory& traj, const DecayRates& rates, DecayMode mode,
                         double e_inf) {
    if (traj.energy.size() != traj.size() || traj.size() < 2)
        throw ConfigError("verify_decay: trajectory lacks a recorded energy split");
    DecayReport rep;
    rep.mode = mode;

    const double h_cov0 = traj.energy[0].h_cov;
    const double h_m0 = traj.energy[0].h_mean;
    const double e0 = traj.energy[0].normalized_total();
    const double scale = 1.0 + h_cov0 + h_m0;

    if (e0 - e_inf <= 1e-14 * scale) {
        rep.vacuous = true;
        rep.passed = true;
        return rep;
    }

    double viol = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        double t = traj.times[k];
        double hc = traj.energy[k].h_cov;
        double hm = traj.energy[k].h_mean;
        switch (mode) {
            case DecayMode::refined: {
                double bc = rates.prefactor_cov * std::exp(-rates.nu_cov * t) * h_cov0;
                double bm = rates.prefactor_mean * std::exp(-rates.nu_mean * t) * h_m0;
                viol = std::max(viol, std::max(hc - bc, hm - bm));
                break;
            }
            case DecayMode::pl_global:
            case DecayMode::pl_sublevel: {
                double bound = std::exp(-rates.c_pl_cov * t) * h_cov0 +
                               std::exp(-rates.c_pl_mean * t) * h_m0;
                viol = std::max(viol, (hc + hm) - bound);
                break;
            }
            case DecayMode::log_lambda: {
                if (!rates.gamma_loglambda)
                    throw ConfigError("verify_decay: log_lambda mode needs gamma_loglambda");
                double bound = std::exp(-*rates.gamma_loglambda * t) * (e0 - e_inf);
                viol = std::max(viol, (hc + hm - e_inf) - bound);
                break;
            }
        }
    }
    rep.max_violation = viol;
    rep.passed = viol <= rep.slack * scale;

    std::vector<double> hc(traj.size()), hm(traj.size()), et(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        hc[k] = traj.energy[k].h_cov;
        hm[k] = traj.energy[k].h_mean;
        et[k] = traj.energy[k].normalized_total();
    }
    rep.fitted_rate_cov = -0.5 * tail_log_slope(traj.times, hc);
    rep.fitted_rate_mean = -0.5 * tail_log_slope(traj.times, hm);
    rep.fitted_rate_energy = -tail_log_slope(traj.times, et);
    return rep;
}

ElResiduals sublevel_minimizer_check(const PotentialTarget& pot,
                                     const ScaledGaussianParams& candidate,
                                     MomentEstimator& est) {
    Moments mom = est.estimate(candidate, pot);
    ElResiduals out;
    out.precision_residual = (inverse_spd(candidate.sigma) - symmetrize(mom.hess)).norm();
    out.gradient_residual = mom.grad.norm();
    return out;
}

} // namespace hkgf
