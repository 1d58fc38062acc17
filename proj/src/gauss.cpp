#include "hkgf/gauss.hpp"

#include <cmath>

#include "hkgf/errors.hpp"

namespace hkgf {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

double lambda_boltzmann(double r) {
    if (r < 0.0) throw DomainError("lambda_boltzmann: negative argument");
    if (r == 0.0) return 1.0;
    double x = r - 1.0;
    if (std::abs(x) < 1e-4) {
        // (1+x)log(1+x) - x = x^2/2 - x^3/6 + x^4/12 - x^5/20 + ...
        return x * x * (0.5 + x * (-1.0 / 6.0 + x * (1.0 / 12.0 - x / 20.0)));
    }
    return r * std::log(r) - r + 1.0;
}

double phi_entropy(double b) {
    if (!(b > 0.0)) throw DomainError("phi_entropy: argument must be positive");
    double x = b - 1.0;
    if (std::abs(x) < 1e-4) {
        // x - log(1+x) = x^2/2 - x^3/3 + x^4/4 - x^5/5 + ...
        return x * x * (0.5 + x * (-1.0 / 3.0 + x * (0.25 - x / 5.0)));
    }
    return x - std::log(b);
}

double zeta_phi(double y) {
    if (!(y > 0.0)) throw DomainError("zeta_phi: argument must be positive");
    double x = y - 1.0;
    return x * x / y;
}

ScaledGaussianParams to_standard(const SimpleCoords& q) {
    const int d = q.dim();
    MatrixXd sigma = inverse_spd(q.A);
    VectorXd m = sigma * q.b;
    double log_kappa = 0.5 * d * kLog2Pi - 0.5 * log_det_spd(q.A) + q.c + 0.5 * q.b.dot(m);
    return ScaledGaussianParams(sigma, m, std::exp(log_kappa));
}

SimpleCoords to_simple(const ScaledGaussianParams& p) {
    const int d = p.dim();
    MatrixXd A = inverse_spd(p.sigma);
    VectorXd b = A * p.m;
    double c = std::log(p.kappa) - 0.5 * d * kLog2Pi - 0.5 * log_det_spd(p.sigma) -
               0.5 * p.m.dot(b);
    return SimpleCoords(A, b, c);
}

double density_at(const ScaledGaussianParams& p, const VectorXd& x) {
    if (x.size() != p.dim()) throw DomainError("density_at: dimension mismatch");
    VectorXd w = x - p.m;
    double log_val = std::log(p.kappa) - 0.5 * quad_form_inv(p.sigma, w) -
                     0.5 * (p.dim() * kLog2Pi + log_det_spd(p.sigma));
    return std::exp(log_val);
}

double relative_entropy_normalized(const MatrixXd& sigma, const VectorXd& m,
                                   const GaussianTarget& target) {
    EnergySplit s = entropy_split(sigma, m, target);
    return s.h_cov + s.h_mean;
}

EnergySplit entropy_split(const MatrixXd& sigma, const VectorXd& m,
                          const GaussianTarget& target) {
    EnergySplit out;
    VectorXd spectrum = target.normalized_spectrum(sigma);
    double h_cov = 0.0;
    for (int i = 0; i < spectrum.size(); ++i) h_cov += phi_entropy(spectrum(i));
    out.h_cov = 0.5 * h_cov;
    VectorXd w = m - target.n;
    out.h_mean = 0.5 * w.dot(target.gamma_inv * w);
    out.mass_term = 0.0;
    return out;
}

EnergySplit entropy_split(const ScaledGaussianParams& p, const GaussianTarget& target) {
    EnergySplit out = entropy_split(p.sigma, p.m, target);
    out.mass_term = target.varkappa * lambda_boltzmann(p.kappa / target.varkappa);
    return out;
}

double relative_entropy(const ScaledGaussianParams& p, const GaussianTarget& target) {
    EnergySplit s = entropy_split(p, target);
    return p.kappa * (s.h_cov + s.h_mean) + s.mass_term;
}

CotangentHK entropy_differential(const ScaledGaussianParams& p, const GaussianTarget& target) {
    MatrixXd sigma_inv = inverse_spd(p.sigma);
    MatrixXd S = symmetrize(0.5 * p.kappa * (target.gamma_inv - sigma_inv));
    VectorXd mu = p.kappa * (target.gamma_inv * (p.m - target.n));
    double k = relative_entropy_normalized(p.sigma, p.m, target) +
               std::log(p.kappa / target.varkappa);
    return CotangentHK(S, mu, k);
}

double moment2(const VectorXd& a, const VectorXd& b) { return a.dot(b); }

double trace_moment(const MatrixXd& A) { return A.trace(); }

double quartic_moment(const MatrixXd& A, const MatrixXd& B) {
    return 2.0 * (A.array() * B.array()).sum() + A.trace() * B.trace();
}

} // namespace hkgf
