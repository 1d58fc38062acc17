#ifndef HKGF_ONSAGER_HPP
#define HKGF_ONSAGER_HPP

#include "hkgf/types.hpp"

namespace hkgf {

/// Reduced Otto (transport) operator:
/// dSigma = (2/kappa)(S Sigma + Sigma S), dm = mu/kappa, dkappa = 0.
TangentHK apply_otto_red(const ScaledGaussianParams& p, const CotangentHK& eta);

/// Reduced Hellinger (growth) operator:
/// dSigma = (2/kappa) Sigma S Sigma, dm = Sigma mu / kappa, dkappa = kappa k.
TangentHK apply_he_red(const ScaledGaussianParams& p, const CotangentHK& eta);

/// alpha * Otto + beta * Hellinger. Requires alpha, beta >= 0, not both zero.
TangentHK apply_hk_red(double alpha, double beta, const ScaledGaussianParams& p,
                       const CotangentHK& eta);

/// Reduced spherical-Hellinger-Kantorovich operator on the normalized
/// manifold (kappa = 1): Otto blocks plus dSigma = 2 Sigma S Sigma,
/// dm = Sigma mu. The mass components (eta.k, dkappa) do not participate.
TangentHK apply_she_red(double alpha, double beta, const MatrixXd& sigma,
                        const CotangentHK& eta);

/// <eta, K^red_{alpha,beta}(p) eta> in closed form:
///   alpha [ 4 tr(S^2 Sigma)/kappa + |mu|^2/kappa ]
/// + beta  [ 2 |Sigma^{1/2} S Sigma^{1/2}|_F^2 / kappa + |Sigma^{1/2} mu|^2/kappa + kappa k^2 ].
/// Nonnegative; zero iff eta = 0.
double quadratic_form(double alpha, double beta, const ScaledGaussianParams& p,
                      const CotangentHK& eta);

/// Normalized-manifold quadratic form (kappa = 1, no mass block).
double quadratic_form_normalized(double alpha, double beta, const MatrixXd& sigma,
                                 const CotangentHK& eta);

/// Coefficients of the unique quadratic polynomial lifting eta:
/// A = S/kappa, b = mu/kappa, c = k - tr(S Sigma)/kappa.
QuadCoefficients xi_from_eta(const ScaledGaussianParams& p, const CotangentHK& eta);

struct OnsagerFormPair {
    double otto;
    double hellinger;
};

/// The two Gaussian integrals int kappa G |grad xi|^2 dx and
/// int kappa G xi^2 dx evaluated in closed form through the standard-Gaussian
/// moment identities applied to xi_from_eta. This is the integral route for
/// (<eta, K_Otto eta>, <eta, K_He eta>), independent of apply_*_red.
OnsagerFormPair full_onsager_form(const ScaledGaussianParams& p, const CotangentHK& eta);

} // namespace hkgf

#endif
