#ifndef HKGF_LINALG_HPP
#define HKGF_LINALG_HPP

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <string>

namespace hkgf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// (M + M^T)/2.
inline MatrixXd symmetrize(const MatrixXd& M) { return 0.5 * (M + M.transpose()); }

/// Relative Frobenius asymmetry |M - M^T| / max(1, |M|).
double asymmetry(const MatrixXd& M);

/// Throws DomainError if M is not symmetric within 1e-12 relative Frobenius
/// tolerance or fails a Cholesky factorization. `name` labels the message.
void require_spd(const MatrixXd& M, const std::string& name);

bool is_spd(const MatrixXd& M);

/// log det of an SPD matrix via Cholesky.
double log_det_spd(const MatrixXd& M);

/// Inverse of an SPD matrix via Cholesky solve (symmetrized).
MatrixXd inverse_spd(const MatrixXd& M);

/// Symmetric square root via eigendecomposition.
MatrixXd sqrt_spd(const MatrixXd& M);

/// exp(M) for symmetric M via eigendecomposition.
MatrixXd exp_sym(const MatrixXd& M);

double min_eigenvalue_sym(const MatrixXd& M);
double max_eigenvalue_sym(const MatrixXd& M);

/// Spectral norm of a symmetric matrix (largest |eigenvalue|).
double spectral_norm_sym(const MatrixXd& M);

/// x^T M^{-1} x for SPD M.
double quad_form_inv(const MatrixXd& M, const VectorXd& x);

/// tr(N Sigma N) = |L^T N|_F^2 for symmetric N and SPD Sigma = L L^T.
/// Nonnegative by construction.
double trace_nsn(const MatrixXd& N, const MatrixXd& Sigma);

} // namespace hkgf

#endif
