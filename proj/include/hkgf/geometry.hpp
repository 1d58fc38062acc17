#ifndef HKGF_GEOMETRY_HPP
#define HKGF_GEOMETRY_HPP

#include <cstdint>
#include <vector>

#include "hkgf/types.hpp"

namespace hkgf {

/// Metric Hessian quadratic form <eta, Hess_K E1(p) eta> on the normalized
/// manifold, assembled as alpha^2 H_Otto + alpha beta H_mix + beta^2 H_SHe.
/// eta's mass component is ignored.
double hessian_form(double alpha, double beta, const MatrixXd& sigma, const VectorXd& m,
                    const GaussianTarget& target, const CotangentHK& eta);

/// Polarization (symmetric bilinear form) of hessian_form.
double hessian_polarization(double alpha, double beta, const MatrixXd& sigma, const VectorXd& m,
                            const GaussianTarget& target, const CotangentHK& eta1,
                            const CotangentHK& eta2);

/// State (point, costate) of the geodesic Hamiltonian system. The normalized
/// restriction keeps kappa = 1 and freezes the mass components.
struct GeodesicState {
    ScaledGaussianParams point;
    CotangentHK costate;
};

enum class GeodesicMode { scaled, normalized };

struct GeodesicDerivative {
    TangentHK point;
    MatrixXd dS;
    VectorXd dmu;
    double dk;
};

/// Hamilton's equations for H(p, xi) = <xi, K^red(p) xi>/2.
GeodesicDerivative geodesic_rhs(double alpha, double beta, const GeodesicState& st,
                                GeodesicMode mode);

/// H(p, xi) = <xi, K^red(p) xi>/2; conserved along geodesics.
double geodesic_hamiltonian(double alpha, double beta, const GeodesicState& st,
                            GeodesicMode mode);

/// RK4 integration of the geodesic system from s = 0 to s_end.
GeodesicState geodesic_integrate(double alpha, double beta, GeodesicState st, double s_end,
                                 double ds, GeodesicMode mode);

struct ScanConfig {
    int n_samples = 1000;
    std::uint64_t seed = 0;
    double sigma_log_range = 1.0;   // log-eigenvalue spread of sampled Sigma
    double mean_radius = 2.0;       // |m - n| scale
};

struct ScanSample {
    MatrixXd sigma;
    VectorXd m;
    CotangentHK eta;
    double quotient;

    ScanSample() : eta(MatrixXd::Zero(1, 1), VectorXd::Zero(1), 0.0), quotient(0.0) {}
};

struct ScanReport {
    double alpha = 0.0;
    double beta = 0.0;
    int n_samples = 0;
    std::uint64_t seed = 0;
    double min_quotient = 0.0;
    ScanSample witness;
    std::vector<double> deciles;   // 0%,10%,...,100% of the quotient sample
};

/// Stochastic scan of the Rayleigh quotient hessian_form / quadratic_form
/// over random (p, eta) with unit-norm eta; deterministic given the seed,
/// and the witness is re-evaluated deterministically.
ScanReport convexity_scan(double alpha, double beta, const GaussianTarget& target,
                          const ScanConfig& cfg);

/// Deterministic witness family for the beta > 0 non-convexity mechanism:
/// the quotient along m - n = r u with the costate aligned against it,
/// evaluated for each radius r. Strictly decreasing and unbounded below in r.
std::vector<double> mean_escape_quotients(double alpha, double beta,
                                          const GaussianTarget& target,
                                          const std::vector<double>& radii);

struct SublevelBound {
    double E = 0.0;
    double r1 = 0.0;   // bound on |m - n|
    double r2 = 0.0;   // bound on |Sigma|
    double r3 = 0.0;   // bound on |Sigma^{-1}|
    double r_E = 0.0;  // max of the three
};

/// Explicit sublevel radius: r1 = sqrt(2 nu_max(Gamma) E),
/// r2 = |Gamma| (1 + log 4 + 4E), r3 = |Gamma^{-1}| e^{1+2E} (spectral norms).
SublevelBound sublevel_radius(double E, const GaussianTarget& target);

} // namespace hkgf

#endif
