#ifndef HKGF_TYPES_HPP
#define HKGF_TYPES_HPP

#include <Eigen/Core>

#include "hkgf/linalg.hpp"

namespace hkgf {

/// Point p = (Sigma, m, kappa) on the scaled-Gaussian manifold: covariance,
/// mean and total mass of kappa * G(Sigma, m). The normalized manifold is the
/// restriction kappa = 1.
///
/// Construction symmetrizes Sigma and validates: Sigma SPD (Cholesky), all
/// fields dimension-consistent, kappa > 0. Values are treated as immutable
/// after construction and are safe to share across threads.
struct ScaledGaussianParams {
    MatrixXd sigma;
    VectorXd m;
    double kappa;

    ScaledGaussianParams(MatrixXd sigma_in, VectorXd m_in, double kappa_in = 1.0);

    int dim() const { return static_cast<int>(m.size()); }

    /// Standard normalized Gaussian (I, 0, 1).
    static ScaledGaussianParams standard(int d);
};

/// Exponential-quadratic coordinates q = (A, b, c): the density is
/// exp(c + b.x - x.Ax/2) with SPD precision matrix A.
struct SimpleCoords {
    MatrixXd A;
    VectorXd b;
    double c;

    SimpleCoords(MatrixXd A_in, VectorXd b_in, double c_in);

    int dim() const { return static_cast<int>(b.size()); }
};

/// Gaussian target varkappa * G(Gamma, n). Caches Gamma^{-1}, Gamma^{-1/2}
/// and log det Gamma, which nearly every downstream formula needs.
struct GaussianTarget {
    MatrixXd gamma;
    VectorXd n;
    double varkappa;

    MatrixXd gamma_inv;
    MatrixXd gamma_inv_sqrt;
    double log_det_gamma;

    explicit GaussianTarget(MatrixXd gamma_in, VectorXd n_in, double varkappa_in = 1.0);

    int dim() const { return static_cast<int>(n.size()); }

    /// Standard normal target with unit mass.
    static GaussianTarget standard(int d);

    /// Eigenvalues of B = Gamma^{-1/2} Sigma Gamma^{-1/2}, ascending.
    VectorXd normalized_spectrum(const MatrixXd& sigma) const;
};

/// Relative-entropy decomposition: kappa * (h_cov + h_mean) + mass_term is
/// the full reduced energy; in the normalized case the total is h_cov + h_mean.
struct EnergySplit {
    double h_cov = 0.0;
    double h_mean = 0.0;
    double mass_term = 0.0;

    double normalized_total() const { return h_cov + h_mean; }
};

/// Dissipation decomposition into the covariance and mean parts.
struct DissipationSplit {
    double d_cov = 0.0;
    double d_mean = 0.0;

    double total() const { return d_cov + d_mean; }
};

/// Cotangent vector eta = (S, mu, k) at a point of the scaled manifold; the
/// normalized case ignores k.
struct CotangentHK {
    MatrixXd S;
    VectorXd mu;
    double k;

    CotangentHK(MatrixXd S_in, VectorXd mu_in, double k_in = 0.0);

    static CotangentHK zero(int d);

    int dim() const { return static_cast<int>(mu.size()); }
};

/// Tangent vector (Sigma-dot, m-dot, kappa-dot).
struct TangentHK {
    MatrixXd d_sigma;
    VectorXd d_m;
    double d_kappa;

    TangentHK(MatrixXd ds, VectorXd dm, double dk)
        : d_sigma(std::move(ds)), d_m(std::move(dm)), d_kappa(dk) {}

    static TangentHK zero(int d) {
        return TangentHK(MatrixXd::Zero(d, d), VectorXd::Zero(d), 0.0);
    }

    double norm() const { return std::sqrt(d_sigma.squaredNorm() + d_m.squaredNorm() + d_kappa * d_kappa); }
};

/// Coefficients of the quadratic polynomial
/// xi(x) = (x-m).A(x-m) + b.(x-m) + c solving the cotangent-lift equation.
struct QuadCoefficients {
    MatrixXd A;
    VectorXd b;
    double c;
};

/// Duality pairing <eta, v> = S:dSigma + mu.dm + k dkappa.
inline double pairing(const CotangentHK& eta, const TangentHK& v) {
    return (eta.S.array() * v.d_sigma.array()).sum() + eta.mu.dot(v.d_m) + eta.k * v.d_kappa;
}

} // namespace hkgf

#endif
