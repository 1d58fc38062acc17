#ifndef HKGF_FLOW_HPP
#define HKGF_FLOW_HPP

#include <functional>
#include <vector>

#include "hkgf/estimator.hpp"
#include "hkgf/potential.hpp"
#include "hkgf/types.hpp"

namespace hkgf {

struct FlowConfig {
    double alpha = 1.0;
    double beta = 1.0;
    double dt = 1e-3;
    double t_end = 1.0;
    enum class Integrator { rk4, euler };
    Integrator integrator = Integrator::rk4;

    double spd_floor = 1e-12;
    int max_halvings = 40;
    bool enforce_monotone = true;    // energy may not increase beyond 1e-8 (1+|E|)
    bool track_eigen = false;        // record spectrum of Gamma^{-1/2} Sigma Gamma^{-1/2}

    void validate() const;
};

/// Sampled solution t -> p(t) with per-step energy and dissipation splits.
/// For Gaussian-target runs all fields are populated; potential-target runs
/// fill kl_estimate instead of the splits.
struct Trajectory {
    std::vector<double> times;
    std::vector<ScaledGaussianParams> points;
    std::vector<EnergySplit> energy;
    std::vector<DissipationSplit> dissipation;
    std::vector<VectorXd> eigen_track;       // empty unless tracked
    std::vector<double> kl_estimate;         // potential-target runs only

    std::size_t size() const { return times.size(); }
    bool uniform_grid(double* h_out = nullptr) const;
};

/// Tangent of the exponential-quadratic coordinates (A, b, c).
struct QTangent {
    MatrixXd dA;
    VectorXd db;
    double dc;
};

/// Right-hand side in simple coordinates:
/// A-dot = alpha (Abar A + A Abar - 2 A^2) + beta (Abar - A)
/// b-dot = alpha (A bbar + Abar b - 2 A b) + beta (bbar - b)
/// c-dot = alpha (tr(Abar - A) + b.(b - bbar)) + beta (cbar - c)
QTangent rhs_simple(double alpha, double beta, const SimpleCoords& q, const SimpleCoords& qbar);

/// Gradient-flow right-hand side for a Gaussian target; identical to
/// -K^red_{alpha,beta}(p) DE(p).
TangentHK rhs_gaussian_target(double alpha, double beta, const ScaledGaussianParams& p,
                              const GaussianTarget& target);

/// General-target right-hand side with Gamma^{-1}(Sigma, m) = E[hess V] and
/// E[grad log pi] = -E[grad V] supplied by the estimator. kappa-dot requires a
/// known normalizer and is zero otherwise.
TangentHK rhs_general_target(double alpha, double beta, const ScaledGaussianParams& p,
                             const PotentialTarget& pot, MomentEstimator& est);

enum class ExplicitBranch { direct, limit };

/// Closed-form solution A(t) of the precision equation,
///   A(t) = Abar + e^{-Ct} ((A0-Abar)^{-1} + alpha C^{-1} - alpha e^{-Ct} C^{-1} e^{-Ct})^{-1} e^{-Ct},
/// C = alpha Abar + (beta/2) I. When A0 - Abar is singular the equivalent
/// resolvent form (I + (A0-Abar) G)^{-1} (A0-Abar) is used; `branch` reports
/// which route was taken.
MatrixXd explicit_precision(double t, double alpha, double beta, const MatrixXd& A0,
                            const MatrixXd& Abar, ExplicitBranch* branch = nullptr);

/// Pure-transport specialization Sigma(t) = Gamma + e^{-alpha t Gamma^{-1}} (Sigma0 - Gamma) e^{-alpha t Gamma^{-1}}.
MatrixXd explicit_sigma_transport(double t, double alpha, const MatrixXd& Sigma0,
                                  const MatrixXd& Gamma);

/// Closed-form mass curve on the trajectory's (uniform) grid:
/// kappa(t) = varkappa (kappa0/varkappa)^{e^{-beta t}}
///            exp(-beta Int_0^t e^{-beta(t-s)} H(Sigma(s), m(s)|Gamma, n) ds),
/// with the integral by cumulative composite Simpson.
std::vector<double> explicit_kappa(const Trajectory& traj, double beta,
                                   const GaussianTarget& target);

using RhsFn = std::function<TangentHK(const ScaledGaussianParams&)>;

/// Fixed-step integration with SPD safeguard (step halving) and energy
/// recording against `target`.
Trajectory integrate(const RhsFn& rhs, const ScaledGaussianParams& p0, const FlowConfig& cfg,
                     const GaussianTarget& target);

/// Convenience wrapper driving rhs_gaussian_target.
Trajectory integrate_gaussian(const ScaledGaussianParams& p0, const FlowConfig& cfg,
                              const GaussianTarget& target);

/// Normalized-manifold flow (kappa frozen at 1): the (Sigma, m) system of the
/// spherical reduction.
Trajectory integrate_normalized(const ScaledGaussianParams& p0, const FlowConfig& cfg,
                                const GaussianTarget& target);

/// Potential-target integration; records the free-energy estimate
/// E[V] - (log det Sigma)/2 - d(1 + log 2 pi)/2 per step (equals the KL
/// divergence when the normalizer is known).
Trajectory integrate_potential(const ScaledGaussianParams& p0, const FlowConfig& cfg,
                               const PotentialTarget& pot, MomentEstimator& est);

/// Fixed-step RK4 in simple coordinates (no energy recording).
std::vector<SimpleCoords> integrate_simple(const SimpleCoords& q0, const SimpleCoords& qbar,
                                           const FlowConfig& cfg, std::vector<double>* times = nullptr);

/// Matrix ODE for B = Gamma^{-1/2} Sigma Gamma^{-1/2} and the
/// Hellmann-Feynman per-eigenvalue rates. Rates are suppressed (degenerate
/// flag) when the spectral gap falls below eig_gap_tol.
struct EigenRates {
    MatrixXd b_dot;
    VectorXd rates;          // aligned with ascending eigenvalues of B
    bool degenerate = false;
};
EigenRates rhs_eigen(double alpha, double beta, const MatrixXd& B, const GaussianTarget& target,
                     double eig_gap_tol = 1e-8);

} // namespace hkgf

#endif
