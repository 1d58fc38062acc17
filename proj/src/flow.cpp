#include "hkgf/flow.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "hkgf/decay.hpp"
#include "hkgf/errors.hpp"
#include "hkgf/gauss.hpp"

namespace hkgf {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;

struct RawState {
    MatrixXd sigma;
    VectorXd m;
    double kappa;
};

RawState advance(const RawState& s, const TangentHK& v, double h) {
    return RawState{symmetrize(s.sigma + h * v.d_sigma), s.m + h * v.d_m,
                    s.kappa + h * v.d_kappa};
}

TangentHK rk4_combine(const TangentHK& k1, const TangentHK& k2, const TangentHK& k3,
                      const TangentHK& k4) {
    return TangentHK(symmetrize((k1.d_sigma + 2.0 * k2.d_sigma + 2.0 * k3.d_sigma + k4.d_sigma) / 6.0),
                     (k1.d_m + 2.0 * k2.d_m + 2.0 * k3.d_m + k4.d_m) / 6.0,
                     (k1.d_kappa + 2.0 * k2.d_kappa + 2.0 * k3.d_kappa + k4.d_kappa) / 6.0);
}

} // namespace

void FlowConfig::validate() const {
    if (alpha < 0.0 || beta < 0.0 || (alpha == 0.0 && beta == 0.0))
        throw ConfigError("flow weights must satisfy alpha, beta >= 0 and alpha + beta > 0");
    if (!(dt > 0.0)) throw ConfigError("flow dt must be positive");
    if (!(t_end > 0.0) || dt >= t_end)
        throw ConfigError("flow requires 0 < dt < t_end");
}

bool Trajectory::uniform_grid(double* h_out) const {
    if (times.size() < 2) return false;
    double h = times[1] - times[0];
    for (std::size_t k = 1; k + 1 < times.size(); ++k)
        if (std::abs(times[k + 1] - times[k] - h) > 1e-9 * std::max(1.0, h)) return false;
    if (h_out) *h_out = h;
    return true;
}

QTangent rhs_simple(double alpha, double beta, const SimpleCoords& q, const SimpleCoords& qbar) {
    QTangent out;
    out.dA = symmetrize(alpha * (qbar.A * q.A + q.A * qbar.A - 2.0 * q.A * q.A) +
                        beta * (qbar.A - q.A));
    out.db = alpha * (q.A * qbar.b + qbar.A * q.b - 2.0 * (q.A * q.b)) + beta * (qbar.b - q.b);
    out.dc = alpha * ((qbar.A - q.A).trace() + q.b.dot(q.b - qbar.b)) + beta * (qbar.c - q.c);
    return out;
}

TangentHK rhs_gaussian_target(double alpha, double beta, const ScaledGaussianParams& p,
                              const GaussianTarget& target) {
    const int d = p.dim();
    const MatrixXd& gi = target.gamma_inv;
    MatrixXd gs = gi * p.sigma;
    MatrixXd ds = symmetrize(alpha * (2.0 * MatrixXd::Identity(d, d) - gs - gs.transpose()) +
                             beta * (p.sigma - p.sigma * gs));
    VectorXd gw = gi * (p.m - target.n);
    VectorXd dm = -(alpha * gw + beta * (p.sigma * gw));
    double dkappa = -beta * p.kappa * (std::log(p.kappa / target.varkappa) +
                                       relative_entropy_normalized(p.sigma, p.m, target));
    return TangentHK(ds, dm, dkappa);
}

TangentHK rhs_general_target(double alpha, double beta, const ScaledGaussianParams& p,
                             const PotentialTarget& pot, MomentEstimator& est) {
    const int d = p.dim();
    Moments mom = est.estimate(p, pot);
    MatrixXd gi = symmetrize(mom.hess);
    MatrixXd gs = gi * p.sigma;
    MatrixXd ds = symmetrize(alpha * (2.0 * MatrixXd::Identity(d, d) - gs - gs.transpose()) +
                             beta * (p.sigma - p.sigma * gs));
    VectorXd dm = -(alpha * mom.grad + beta * (p.sigma * mom.grad));
    double dkappa = 0.0;
    if (pot.normalizer_known) {
        double h = mom.value - 0.5 * log_det_spd(p.sigma) - 0.5 * d * (1.0 + kLog2Pi);
        dkappa = -beta * p.kappa * (std::log(p.kappa) + h);
    }
    return TangentHK(ds, dm, dkappa);
}

MatrixXd explicit_sigma_transport(double t, double alpha, const MatrixXd& Sigma0,
                                  const MatrixXd& Gamma) {
    MatrixXd E = exp_sym(-alpha * t * inverse_spd(Gamma));
    return symmetrize(Gamma + E * (Sigma0 - Gamma) * E);
}

MatrixXd explicit_precision(double t, double alpha, double beta, const MatrixXd& A0,
                            const MatrixXd& Abar, ExplicitBranch* branch) {
    const int d = static_cast<int>(A0.rows());
    if (t == 0.0) {
        if (branch) *branch = ExplicitBranch::direct;
        return A0;
    }
    MatrixXd C = symmetrize(alpha * Abar + 0.5 * beta * MatrixXd::Identity(d, d));
    MatrixXd E = exp_sym(-t * C);
    MatrixXd B0 = symmetrize(A0 - Abar);

    MatrixXd G = MatrixXd::Zero(d, d);
    if (alpha != 0.0) {
        MatrixXd Cinv = inverse_spd(C);
        G = symmetrize(alpha * (Cinv - E * Cinv * E));
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(B0, Eigen::EigenvaluesOnly);
    double abs_max = es.eigenvalues().array().abs().maxCoeff();
    double abs_min = es.eigenvalues().array().abs().minCoeff();

    if (abs_max <= 1e-14 * std::max(1.0, Abar.norm())) {
        if (branch) *branch = ExplicitBranch::limit;
        return Abar;
    }

    MatrixXd inner;
    if (abs_min > 1e-10 * abs_max) {
        // (B0^{-1} + G)^{-1}
        MatrixXd mid = B0.fullPivLu().inverse() + G;
        inner = mid.fullPivLu().inverse();
        if (branch) *branch = ExplicitBranch::direct;
    } else {
        // singular B0: equivalent resolvent form (I + B0 G)^{-1} B0
        MatrixXd lhs = MatrixXd::Identity(d, d) + B0 * G;
        inner = lhs.fullPivLu().solve(B0);
        if (branch) *branch = ExplicitBranch::limit;
    }
    return symmetrize(Abar + E * inner * E);
}

std::vector<double> explicit_kappa(const Trajectory& traj, double beta,
                                   const GaussianTarget& target) {
    double h = 0.0;
    if (!traj.uniform_grid(&h))
        throw ConfigError("explicit_kappa requires a uniform time grid with at least 2 points");
    const std::size_t n = traj.size();
    double kappa0 = traj.points[0].kappa;
    std::vector<double> out(n);
    if (beta == 0.0) {
        std::fill(out.begin(), out.end(), kappa0);
        return out;
    }
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k)
        g[k] = std::exp(beta * traj.times[k]) *
               relative_entropy_normalized(traj.points[k].sigma, traj.points[k].m, target);
    // cumulative Simpson; odd prefixes close with a quadratic-fit end cell
    std::vector<double> J(n, 0.0);
    for (std::size_t k = 2; k < n; k += 2)
        J[k] = J[k - 2] + h / 3.0 * (g[k - 2] + 4.0 * g[k - 1] + g[k]);
    for (std::size_t k = 1; k < n; k += 2) {
        if (k == 1) {
            J[1] = (n > 2) ? h / 12.0 * (5.0 * g[0] + 8.0 * g[1] - g[2])
                           : 0.5 * h * (g[0] + g[1]);
        } else {
            J[k] = J[k - 1] + h / 12.0 * (-g[k - 2] + 8.0 * g[k - 1] + 5.0 * g[k]);
        }
    }
    double vk = target.varkappa;
    for (std::size_t k = 0; k < n; ++k) {
        double decay = std::exp(-beta * traj.times[k]);
        out[k] = vk * std::pow(kappa0 / vk, decay) * std::exp(-beta * decay * J[k]);
    }
    return out;
}

namespace {

class Stepper {
public:
    Stepper(const RhsFn& rhs, const FlowConfig& cfg) : rhs_(rhs), cfg_(cfg) {}

    RawState step(const RawState& s, double t, double dt, int depth) const {
        RawState next;
        bool ok = try_step(s, dt, &next);
        if (ok) return next;
        if (depth >= cfg_.max_halvings)
            throw IntegrationError("SPD safeguard: step halving exhausted after " +
                                       std::to_string(cfg_.max_halvings) + " levels",
                                   t);
        RawState half = step(s, t, 0.5 * dt, depth + 1);
        return step(half, t + 0.5 * dt, 0.5 * dt, depth + 1);
    }

private:
    bool try_step(const RawState& s, double dt, RawState* out) const {
        try {
            TangentHK inc = increment(s, dt);
            RawState next = advance(s, inc, dt);
            if (!(next.kappa > 0.0) || !next.sigma.allFinite() || !next.m.allFinite())
                return false;
            if (min_eigenvalue_sym(next.sigma) <= cfg_.spd_floor) return false;
            *out = next;
            return true;
        } catch (const DomainError&) {
            return false;
        } catch (const NumericalError&) {
            return false;
        }
    }

    TangentHK increment(const RawState& s, double dt) const {
        TangentHK k1 = eval(s);
        if (cfg_.integrator == FlowConfig::Integrator::euler) return k1;
        TangentHK k2 = eval(advance(s, k1, 0.5 * dt));
        TangentHK k3 = eval(advance(s, k2, 0.5 * dt));
        TangentHK k4 = eval(advance(s, k3, dt));
        return rk4_combine(k1, k2, k3, k4);
    }

    TangentHK eval(const RawState& s) const {
        return rhs_(ScaledGaussianParams(s.sigma, s.m, s.kappa));
    }

    const RhsFn& rhs_;
    const FlowConfig& cfg_;
};

/// Pair the columns of `current` to those of `previous` by maximal |overlap|.
void align_eigenvectors(const MatrixXd& previous, MatrixXd& vectors, VectorXd& values) {
    const int d = static_cast<int>(values.size());
    MatrixXd overlap = (previous.transpose() * vectors).cwiseAbs();
    std::vector<int> assign(d, -1);
    std::vector<bool> used(d, false);
    for (int step = 0; step < d; ++step) {
        int bi = -1, bj = -1;
        double best = -1.0;
        for (int i = 0; i < d; ++i) {
            if (assign[i] >= 0) continue;
            for (int j = 0; j < d; ++j) {
                if (used[j]) continue;
                if (overlap(i, j) > best) {
                    best = overlap(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        assign[bi] = bj;
        used[bj] = true;
    }
    MatrixXd v2 = vectors;
    VectorXd l2 = values;
    for (int i = 0; i < d; ++i) {
        vectors.col(i) = v2.col(assign[i]);
        values(i) = l2(assign[i]);
    }
}

} // namespace

Trajectory integrate(const RhsFn& rhs, const ScaledGaussianParams& p0, const FlowConfig& cfg,
                     const GaussianTarget& target) {
    cfg.validate();
    Trajectory traj;
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    traj.times.reserve(n_steps + 1);
    traj.points.reserve(n_steps + 1);

    Stepper stepper(rhs, cfg);
    RawState s{p0.sigma, p0.m, p0.kappa};
    MatrixXd eig_basis;

    double prev_energy = 0.0;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        double t = k * cfg.dt;
        ScaledGaussianParams p(s.sigma, s.m, s.kappa);
        EnergySplit es = entropy_split(p, target);
        double total = p.kappa * es.normalized_total() + es.mass_term;
        if (cfg.enforce_monotone && k > 0 &&
            total > prev_energy + 1e-8 * (1.0 + std::abs(prev_energy)))
            throw IntegrationError("energy increased by " + std::to_string(total - prev_energy),
                                   t);
        prev_energy = total;

        traj.times.push_back(t);
        traj.points.push_back(p);
        traj.energy.push_back(es);
        traj.dissipation.push_back(dissipation_split(cfg.alpha, cfg.beta, p.sigma, p.m, target));
        if (cfg.track_eigen) {
            MatrixXd B = symmetrize(target.gamma_inv_sqrt * p.sigma * target.gamma_inv_sqrt);
            Eigen::SelfAdjointEigenSolver<MatrixXd> se(B);
            MatrixXd vec = se.eigenvectors();
            VectorXd val = se.eigenvalues();
            if (k > 0) align_eigenvectors(eig_basis, vec, val);
            eig_basis = vec;
            traj.eigen_track.push_back(val);
        }

        if (k < n_steps) s = stepper.step(s, t, cfg.dt, 0);
    }
    return traj;
}

Trajectory integrate_gaussian(const ScaledGaussianParams& p0, const FlowConfig& cfg,
                              const GaussianTarget& target) {
    RhsFn rhs = [&](const ScaledGaussianParams& p) {
        return rhs_gaussian_target(cfg.alpha, cfg.beta, p, target);
    };
    return integrate(rhs, p0, cfg, target);
}

Trajectory integrate_normalized(const ScaledGaussianParams& p0, const FlowConfig& cfg,
                                const GaussianTarget& target) {
    if (std::abs(p0.kappa - 1.0) > 1e-12)
        throw ConfigError("integrate_normalized: initial mass must be 1");
    RhsFn rhs = [&](const ScaledGaussianParams& p) {
        TangentHK v = rhs_gaussian_target(cfg.alpha, cfg.beta, p, target);
        return TangentHK(v.d_sigma, v.d_m, 0.0);
    };
    return integrate(rhs, p0, cfg, target);
}

Trajectory integrate_potential(const ScaledGaussianParams& p0, const FlowConfig& cfg,
                               const PotentialTarget& pot, MomentEstimator& est) {
    cfg.validate();
    Trajectory traj;
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    RhsFn rhs = [&](const ScaledGaussianParams& p) {
        return rhs_general_target(cfg.alpha, cfg.beta, p, pot, est);
    };
    Stepper stepper(rhs, cfg);
    RawState s{p0.sigma, p0.m, p0.kappa};
    const int d = p0.dim();

    double prev = 0.0;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        double t = k * cfg.dt;
        ScaledGaussianParams p(s.sigma, s.m, s.kappa);
        Moments mom = est.estimate(p, pot);
        double fe = mom.value - 0.5 * log_det_spd(p.sigma) - 0.5 * d * (1.0 + kLog2Pi);
        if (cfg.enforce_monotone && k > 0 && fe > prev + 1e-8 * (1.0 + std::abs(prev)))
            throw IntegrationError("energy increased by " + std::to_string(fe - prev), t);
        prev = fe;
        traj.times.push_back(t);
        traj.points.push_back(p);
        traj.kl_estimate.push_back(fe);
        if (k < n_steps) s = stepper.step(s, t, cfg.dt, 0);
    }
    return traj;
}

std::vector<SimpleCoords> integrate_simple(const SimpleCoords& q0, const SimpleCoords& qbar,
                                           const FlowConfig& cfg, std::vector<double>* times) {
    cfg.validate();
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    std::vector<SimpleCoords> out;
    out.reserve(n_steps + 1);
    MatrixXd A = q0.A;
    VectorXd b = q0.b;
    double c = q0.c;
    auto eval = [&](const MatrixXd& A_, const VectorXd& b_, double c_) {
        return rhs_simple(cfg.alpha, cfg.beta, SimpleCoords(A_, b_, c_), qbar);
    };
    for (std::size_t k = 0; k <= n_steps; ++k) {
        if (times) times->push_back(k * cfg.dt);
        out.emplace_back(A, b, c);
        if (k == n_steps) break;
        double h = cfg.dt;
        QTangent k1 = eval(A, b, c);
        if (cfg.integrator == FlowConfig::Integrator::euler) {
            A = symmetrize(A + h * k1.dA);
            b += h * k1.db;
            c += h * k1.dc;
        } else {
            QTangent k2 = eval(symmetrize(A + 0.5 * h * k1.dA), b + 0.5 * h * k1.db, c + 0.5 * h * k1.dc);
            QTangent k3 = eval(symmetrize(A + 0.5 * h * k2.dA), b + 0.5 * h * k2.db, c + 0.5 * h * k2.dc);
            QTangent k4 = eval(symmetrize(A + h * k3.dA), b + h * k3.db, c + h * k3.dc);
            A = symmetrize(A + h / 6.0 * (k1.dA + 2.0 * k2.dA + 2.0 * k3.dA + k4.dA));
            b += h / 6.0 * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db);
            c += h / 6.0 * (k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc);
        }
        if (min_eigenvalue_sym(A) <= cfg.spd_floor)
            throw IntegrationError("precision matrix lost positivity", (k + 1) * cfg.dt);
    }
    return out;
}

EigenRates rhs_eigen(double alpha, double beta, const MatrixXd& B, const GaussianTarget& target,
                     double eig_gap_tol) {
    require_spd(B, "B");
    const int d = static_cast<int>(B.rows());
    const MatrixXd& gi = target.gamma_inv;
    EigenRates out;
    MatrixXd gb = gi * B;
    out.b_dot = symmetrize(-alpha * (gb + gb.transpose() - 2.0 * gi) + beta * (B - B * B));

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(B));
    const VectorXd& ev = es.eigenvalues();
    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < d; ++i) min_gap = std::min(min_gap, ev(i + 1) - ev(i));
    if (d > 1 && min_gap <= eig_gap_tol) {
        out.degenerate = true;
        return out;
    }
    out.rates.resize(d);
    for (int i = 0; i < d; ++i) {
        VectorXd v = es.eigenvectors().col(i);
        out.rates(i) = -(2.0 * alpha * v.dot(gi * v) + beta * ev(i)) * (ev(i) - 1.0);
    }
    return out;
}

} // namespace hkgf
