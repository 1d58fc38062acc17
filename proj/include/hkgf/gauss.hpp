#ifndef HKGF_GAUSS_HPP
#define HKGF_GAUSS_HPP

#include "hkgf/types.hpp"

namespace hkgf {

/// Boltzmann function lambda_B(r) = r log r - r + 1, extended by
/// lambda_B(0) = 1 (lower semicontinuous limit). Nonnegative, zero at r = 1.
double lambda_boltzmann(double r);

/// phi(b) = b - 1 - log b, evaluated stably near b = 1 (series branch).
double phi_entropy(double b);

/// zeta_phi(y) = (y^{1/2} - y^{-1/2})^2 = (y-1)^2 / y.
double zeta_phi(double y);

/// Coordinate change (A, b, c) -> (Sigma, m, kappa):
/// Sigma = A^{-1}, m = A^{-1} b, kappa = (2 pi)^{d/2} det(A)^{-1/2} exp(c + b.A^{-1}b / 2).
ScaledGaussianParams to_standard(const SimpleCoords& q);

/// Inverse coordinate change; to_standard(to_simple(p)) == p.
SimpleCoords to_simple(const ScaledGaussianParams& p);

/// Pointwise density kappa * G(Sigma, m)(x).
double density_at(const ScaledGaussianParams& p, const VectorXd& x);

/// Relative Boltzmann entropy H(Sigma, m | Gamma, n) between normalized
/// Gaussians. Computed through the spectrum of Gamma^{-1/2} Sigma Gamma^{-1/2}
/// plus the mean quadratic, which keeps it exactly nonnegative.
double relative_entropy_normalized(const MatrixXd& sigma, const VectorXd& m,
                                   const GaussianTarget& target);

/// Full reduced energy kappa * H(Sigma,m|Gamma,n) + varkappa * lambda_B(kappa/varkappa).
double relative_entropy(const ScaledGaussianParams& p, const GaussianTarget& target);

/// Covariance/mean split of H plus the mass term (normalized overload has
/// mass_term = 0 only when kappa = varkappa; the (Sigma, m) overload assumes
/// the normalized case kappa = varkappa = 1).
EnergySplit entropy_split(const MatrixXd& sigma, const VectorXd& m, const GaussianTarget& target);
EnergySplit entropy_split(const ScaledGaussianParams& p, const GaussianTarget& target);

/// Differential of the reduced energy:
/// S-block (kappa/2)(Gamma^{-1} - Sigma^{-1}), mu-block kappa Gamma^{-1}(m-n),
/// k-block H(Sigma,m|Gamma,n) + log(kappa/varkappa).
CotangentHK entropy_differential(const ScaledGaussianParams& p, const GaussianTarget& target);

/// Standard-Gaussian moment identities:
///   E[(a.x)(b.x)] = a.b
///   E[x.Ax]       = tr(A)
///   E[(x.Ax)(x.Bx)] = 2 A:B + tr(A) tr(B)   (A, B symmetric)
double moment2(const VectorXd& a, const VectorXd& b);
double trace_moment(const MatrixXd& A);
double quartic_moment(const MatrixXd& A, const MatrixXd& B);

} // namespace hkgf

#endif
