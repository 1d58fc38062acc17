#ifndef HKGF_DESCENT_HPP
#define HKGF_DESCENT_HPP

#include <vector>

#include "hkgf/estimator.hpp"
#include "hkgf/potential.hpp"
#include "hkgf/types.hpp"

namespace hkgf {

struct DescentConfig {
    double alpha = 1.0;
    double beta = 1.0;
    double tau = 1e-3;
    int n_steps = 1000;
    int n_mc = 1;
    bool resample_midstep = false;
    std::uint64_t seed = 0;
    bool track_mass = false;
    MomentEstimator::Mode estimator_mode = MomentEstimator::Mode::monte_carlo;
    int gh_nodes = 10;

    void validate() const;   // tau > 0 and tau*beta < 1, among others
};

/// Iterate carrying both representations: the Bures-Wasserstein step updates
/// the covariance, the Fisher-Rao step the precision. Conversions between the
/// two are explicit and counted.
struct DescentState {
    MatrixXd sigma;
    MatrixXd precision;
    VectorXd m;
    double kappa = 1.0;
    bool sigma_current = true;       // which representation is authoritative
    long conversions = 0;

    static DescentState from_params(const ScaledGaussianParams& p);
    const MatrixXd& covariance();    // converts if needed
    const MatrixXd& prec();          // converts if needed
    ScaledGaussianParams params();
};

/// Fisher-Rao step: precision <- (1 - tau beta) precision + tau beta E[hess V],
/// then m <- m - tau beta Sigma_{k+1} E[grad V].
void fr_step(double tau, double beta, DescentState& st, MomentEstimator& est,
             const PotentialTarget& pot);

/// Bures-Wasserstein step: Sigma <- M Sigma M with
/// M = I + tau alpha (Sigma^{-1} - E[hess V]), m <- m - tau alpha E[grad V].
void bw_step(double tau, double alpha, DescentState& st, MomentEstimator& est,
             const PotentialTarget& pot);

/// Mass step kappa <- kappa - tau beta kappa (H(rho_k | pi) + log(kappa/varkappa));
/// closed form for Gaussian targets, sampled estimate when the normalizer is
/// known, disabled otherwise. Halves tau for this component if kappa would
/// leave (0, inf).
void mass_step(double tau, double beta, DescentState& st, const PotentialTarget& pot,
               MomentEstimator& est);

struct DescentRecord {
    int step = 0;
    double kl_estimate = 0.0;      // exact KL for Gaussian targets, otherwise
                                   // the free energy (KL up to the unknown
                                   // log-normalizer)
    VectorXd m;
    MatrixXd sigma;
    double kappa = 1.0;
};

struct DescentResult {
    std::vector<DescentRecord> steps;
    ScaledGaussianParams final() const;
    long conversions = 0;
    double fitted_rate = 0.0;      // tail log-linear fit of the KL estimate
};

/// Discrete-time HK-Gaussian gradient descent: per iteration a BW step, an
/// optional mid-step re-sample, an FR step and (optionally) a mass step, in
/// that order. Deterministic given the seed.
DescentResult run_descent(const DescentConfig& cfg, const ScaledGaussianParams& p0,
                          const PotentialTarget& pot);

/// Damped Newton minimizer of V; the independent MAP oracle for logistic
/// tests. Backtracks on the value until decrease.
VectorXd newton_minimize(const PotentialTarget& pot, VectorXd theta, int max_iter = 200,
                         double tol = 1e-12);

} // namespace hkgf

#endif
