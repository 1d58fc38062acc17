#ifndef HKGF_DECAY_HPP
#define HKGF_DECAY_HPP

#include <optional>

#include "hkgf/estimator.hpp"
#include "hkgf/flow.hpp"
#include "hkgf/types.hpp"

namespace hkgf {

/// Dissipation of the normalized flow, split into covariance and mean parts:
/// D_cov = alpha tr((Gamma^{-1} Sigma - I)^2 Sigma^{-1}) + (beta/2) tr((Gamma^{-1} Sigma - I)^2)
/// D_m   = alpha |Gamma^{-1}(m-n)|^2 + beta (m-n).Gamma^{-1} Sigma Gamma^{-1} (m-n)
DissipationSplit dissipation_split(double alpha, double beta, const MatrixXd& sigma,
                                   const VectorXd& m, const GaussianTarget& target);

/// H(delta, beta; y) = (delta + beta y) zeta_phi(y)/phi(y), continuously
/// extended by 2 (delta + beta) at y = 1.
double H_aux(double delta, double beta, double y);

/// zeta_phi/phi (decreasing, limit 1 at infinity) and y zeta_phi/phi
/// (increasing, limit 0 at 0), stable near y = 1 where both tend to 2.
double h_ratio_cov(double y);
double h_ratio_mass(double y);

struct Interval {
    double lo;
    double hi;   // may be +infinity
};

/// inf_{y in J} H(delta, beta; y). Endpoint limits where one weight
/// vanishes (the factors are monotone); a bracketed scan plus golden-section
/// refinement otherwise. Throws on an empty interval.
double h_inf(double delta, double beta, Interval J);

struct PlConstants {
    double c_cov = 0.0;
    double c_mean = 0.0;
};

/// Polyak-Lojasiewicz constants. Without an energy level: the global
/// three-case constant (h_inf over (0,inf) for alpha_Gamma*beta > 0,
/// 2 alpha_Gamma for beta = 0, 0 for alpha_Gamma = 0) and c_mean = 2 alpha_Gamma.
/// With a level E: the sublevel constants on J_E = (e^{-(1+2E)}, 1+log4+4E).
PlConstants pl_constants(double alpha, double beta, const GaussianTarget& target,
                         std::optional<double> E = std::nullopt);

struct DecayRates {
    double nu_cov = 0.0;            // 2 alpha nu_min(Gamma^{-1}) + beta
    double nu_mean = 0.0;           // 2 (alpha nu_min(Gamma^{-1}) + beta)
    double prefactor_cov = 1.0;     // min(1, b_min(0))^{-beta/nu_cov}
    double prefactor_mean = 1.0;    // min(1, b_min(0))^{-2 beta/nu_cov}
    double c_pl_cov = 0.0;
    double c_pl_mean = 0.0;
    std::optional<double> gamma_loglambda;
};

/// Refined eigenvalue-based rates plus global PL constants.
DecayRates refined_rates(double alpha, double beta, const GaussianTarget& target, double b_min0);

enum class DecayMode { pl_global, pl_sublevel, refined, log_lambda };

struct DecayReport {
    DecayMode mode = DecayMode::refined;
    bool vacuous = false;            // trajectory started at equilibrium
    double max_violation = 0.0;      // worst pointwise excess over the bound
    bool passed = false;             // max_violation <= slack
    double slack = 1e-9;
    /// Tail-half log-linear fits. The energy splits are quadratic in the
    /// deviations near equilibrium, so the *linear* rates (of |Sigma-Gamma|
    /// and |m-n|) are half the energy log-slopes; fitted_rate_cov and
    /// fitted_rate_mean use that convention, fitted_rate_energy is the raw
    /// slope of the total energy (the PL-comparison quantity).
    double fitted_rate_cov = 0.0;
    double fitted_rate_mean = 0.0;
    double fitted_rate_energy = 0.0;
};

/// Pointwise verification of the decay theorems on a recorded trajectory.
/// refined:    H_cov(t) <= prefactor_cov e^{-nu_cov t} H_cov(0), mean analogue.
/// pl_*:       E1(t) <= e^{-c_cov t} H_cov(0) + e^{-c_mean t} H_m(0),
///             with the rates taken from `rates.c_pl_*`.
/// log_lambda: E1(t) - e_inf <= e^{-gamma t} (E1(0) - e_inf).
DecayReport verify_decay(const Trajectory& traj, const DecayRates& rates, DecayMode mode,
                         double e_inf = 0.0);

struct ElResiduals {
    double precision_residual = 0.0;   // |Sigma^{-1} - E[hess V]|_F
    double gradient_residual = 0.0;    // |E[grad V]|
};

/// Residuals of the stationarity system Sigma^{-1} = E[hess V], 0 = E[grad V]
/// under G(Sigma, m), with expectations from the supplied estimator.
ElResiduals sublevel_minimizer_check(const PotentialTarget& pot,
                                     const ScaledGaussianParams& candidate,
                                     MomentEstimator& est);

} // namespace hkgf

#endif
