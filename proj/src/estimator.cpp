#include "hkgf/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hkgf/errors.hpp"

namespace hkgf {

MomentEstimator MomentEstimator::exact() {
    MomentEstimator e;
    e.mode_ = Mode::exact_gaussian;
    return e;
}

MomentEstimator MomentEstimator::monte_carlo(int n_mc, std::uint64_t seed) {
    if (n_mc < 1) throw ConfigError("monte_carlo estimator needs n_mc >= 1");
    MomentEstimator e;
    e.mode_ = Mode::monte_carlo;
    e.n_mc_ = n_mc;
    e.seed_ = seed;
    e.rng_ = std::make_shared<Rng>(seed);
    return e;
}

MomentEstimator MomentEstimator::gauss_hermite(int nodes_per_dim) {
    if (nodes_per_dim < 1) throw ConfigError("gauss_hermite estimator needs nodes_per_dim >= 1");
    MomentEstimator e;
    e.mode_ = Mode::gauss_hermite;
    e.nodes_per_dim_ = nodes_per_dim;
    return e;
}

void gauss_hermite_rule(int n, VectorXd& nodes, VectorXd& weights) {
    // Jacobi matrix of the (physicists') Hermite recurrence, off-diagonal sqrt(k/2).
    MatrixXd J = MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double off = std::sqrt(0.5 * k);
        J(k, k - 1) = off;
        J(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // E[f(Z)] with Z ~ N(0,1): node sqrt(2) x_i, weight v0^2 (sqrt(pi) cancels).
        nodes(i) = std::sqrt(2.0) * es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        weights(i) = v0 * v0;
    }
}

namespace {

Moments exact_quadratic_moments(const ScaledGaussianParams& p, const PotentialTarget& pot) {
    if (pot.kind != PotentialTarget::Kind::gaussian_quadratic || !pot.gaussian)
        throw ConfigError("exact_gaussian estimator requires a gaussian_quadratic potential");
    const GaussianTarget& t = *pot.gaussian;
    Moments mom;
    VectorXd w = p.m - t.n;
    // E[V] = tr(Gamma^{-1} Sigma)/2 + w.Gamma^{-1} w/2 + log det(2 pi Gamma)/2
    mom.value = 0.5 * (t.gamma_inv.array() * p.sigma.array()).sum() +
                0.5 * w.dot(t.gamma_inv * w) + pot.value(t.n);
    mom.grad = t.gamma_inv * w;
    mom.hess = t.gamma_inv;
    return mom;
}

void accumulate(Moments& mom, const PotentialTarget& pot, const VectorXd& x, double weight) {
    double v = pot.value(x);
    VectorXd g = pot.grad(x);
    MatrixXd h = pot.hess(x);
    if (!std::isfinite(v) || !g.allFinite() || !h.allFinite()) {
        std::string pt = "[";
        for (int i = 0; i < x.size(); ++i) pt += (i ? ", " : "") + std::to_string(x(i));
        throw NumericalError("potential oracle returned a non-finite value at sample " + pt + "]");
    }
    mom.value += weight * v;
    mom.grad += weight * g;
    mom.hess += weight * h;
}

} // namespace

Moments MomentEstimator::estimate(const ScaledGaussianParams& p, const PotentialTarget& pot) {
    const int d = p.dim();
    if (pot.dim != d)
        throw ConfigError("potential dimension " + std::to_string(pot.dim) +
                          " does not match state dimension " + std::to_string(d));
    if (mode_ == Mode::exact_gaussian) return exact_quadratic_moments(p, pot);

    Moments mom;
    mom.grad = VectorXd::Zero(d);
    mom.hess = MatrixXd::Zero(d, d);

    if (mode_ == Mode::monte_carlo) {
        MatrixXd root = sqrt_spd(p.sigma);
        double w = 1.0 / n_mc_;
        for (int s = 0; s < n_mc_; ++s) {
            VectorXd x = p.m + root * rng_->normal_vector(d);
            accumulate(mom, pot, x, w);
        }
        mom.hess = symmetrize(mom.hess);
        return mom;
    }

    // gauss_hermite
    if (d > 4) throw ConfigError("gauss_hermite estimator supports d <= 4");
    VectorXd nodes, weights;
    gauss_hermite_rule(nodes_per_dim_, nodes, weights);
    MatrixXd root = sqrt_spd(p.sigma);
    std::vector<int> idx(d, 0);
    const int n = nodes_per_dim_;
    while (true) {
        VectorXd z(d);
        double w = 1.0;
        for (int j = 0; j < d; ++j) {
            z(j) = nodes(idx[j]);
            w *= weights(idx[j]);
        }
        accumulate(mom, pot, p.m + root * z, w);
        int j = 0;
        while (j < d && ++idx[j] == n) idx[j++] = 0;
        if (j == d) break;
    }
    mom.hess = symmetrize(mom.hess);
    return mom;
}

VectorXd MomentEstimator::gradient_standard_error(const ScaledGaussianParams& p,
                                                  const PotentialTarget& pot) {
    if (mode_ != Mode::monte_carlo)
        return VectorXd::Zero(p.dim());
    const int d = p.dim();
    MatrixXd root = sqrt_spd(p.sigma);
    VectorXd mean = VectorXd::Zero(d), m2 = VectorXd::Zero(d);
    for (int s = 0; s < n_mc_; ++s) {
        VectorXd g = pot.grad(p.m + root * rng_->normal_vector(d));
        mean += g;
        m2 += g.cwiseProduct(g);
    }
    mean /= n_mc_;
    m2 /= n_mc_;
    VectorXd var = (m2 - mean.cwiseProduct(mean)).cwiseMax(0.0);
    return (var / std::max(1, n_mc_ - 1)).cwiseSqrt();
}

} // namespace hkgf
