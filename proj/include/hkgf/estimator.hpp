#ifndef HKGF_ESTIMATOR_HPP
#define HKGF_ESTIMATOR_HPP

#include <memory>

#include "hkgf/potential.hpp"
#include "hkgf/rng.hpp"

namespace hkgf {

struct Moments {
    double value = 0.0;
    VectorXd grad;
    MatrixXd hess;        // symmetrized
};

/// Estimator of E[V], E[grad V], E[hess V] under G(Sigma, m).
///
/// exact_gaussian: closed forms, valid for quadratic potentials only.
/// monte_carlo: n_mc samples x = m + Sigma^{1/2} z with z standard normal
///   drawn from the estimator's own seeded stream (stateful across calls).
/// gauss_hermite: tensorized Gauss-Hermite nodes, d <= 4.
class MomentEstimator {
public:
    enum class Mode { exact_gaussian, monte_carlo, gauss_hermite };

    static MomentEstimator exact();
    static MomentEstimator monte_carlo(int n_mc, std::uint64_t seed);
    static MomentEstimator gauss_hermite(int nodes_per_dim);

    Mode mode() const { return mode_; }
    int n_mc() const { return n_mc_; }

    Moments estimate(const ScaledGaussianParams& p, const PotentialTarget& pot);

    /// Monte Carlo standard error of the gradient estimate at p (per
    /// coordinate), from the same sampling scheme; for diagnostics/tests.
    VectorXd gradient_standard_error(const ScaledGaussianParams& p, const PotentialTarget& pot);

private:
    MomentEstimator() = default;

    Mode mode_ = Mode::exact_gaussian;
    int n_mc_ = 1;
    int nodes_per_dim_ = 5;
    std::uint64_t seed_ = 0;
    std::shared_ptr<Rng> rng_;   // shared so copies advance one stream
};

/// Gauss-Hermite nodes/weights for E[f(Z)], Z ~ N(0,1):
/// E[f] = sum_i w_i f(x_i). Golub-Welsch on the Jacobi matrix.
void gauss_hermite_rule(int n, VectorXd& nodes, VectorXd& weights);

} // namespace hkgf

#endif
