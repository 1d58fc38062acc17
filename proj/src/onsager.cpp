#include "hkgf/onsager.hpp"

#include "hkgf/errors.hpp"
#include "hkgf/gauss.hpp"

namespace hkgf {

namespace {
void check_weights(double alpha, double beta) {
    if (alpha < 0.0 || beta < 0.0)
        throw ConfigError("geometry weights must be nonnegative (alpha = " +
                          std::to_string(alpha) + ", beta = " + std::to_string(beta) + ")");
    if (alpha == 0.0 && beta == 0.0)
        throw ConfigError("geometry weights alpha and beta cannot both be zero");
}
} // namespace

TangentHK apply_otto_red(const ScaledGaussianParams& p, const CotangentHK& eta) {
    MatrixXd ds = symmetrize((2.0 / p.kappa) * (eta.S * p.sigma + p.sigma * eta.S));
    return TangentHK(ds, eta.mu / p.kappa, 0.0);
}

TangentHK apply_he_red(const ScaledGaussianParams& p, const CotangentHK& eta) {
    MatrixXd ds = symmetrize((2.0 / p.kappa) * (p.sigma * eta.S * p.sigma));
    return TangentHK(ds, (p.sigma * eta.mu) / p.kappa, p.kappa * eta.k);
}

TangentHK apply_hk_red(double alpha, double beta, const ScaledGaussianParams& p,
                       const CotangentHK& eta) {
    check_weights(alpha, beta);
    TangentHK o = apply_otto_red(p, eta);
    TangentHK h = apply_he_red(p, eta);
    return TangentHK(symmetrize(alpha * o.d_sigma + beta * h.d_sigma),
                     alpha * o.d_m + beta * h.d_m,
                     alpha * o.d_kappa + beta * h.d_kappa);
}

TangentHK apply_she_red(double alpha, double beta, const MatrixXd& sigma,
                        const CotangentHK& eta) {
    check_weights(alpha, beta);
    MatrixXd ds = symmetrize(alpha * 2.0 * (eta.S * sigma + sigma * eta.S) +
                             beta * 2.0 * (sigma * eta.S * sigma));
    VectorXd dm = alpha * eta.mu + beta * (sigma * eta.mu);
    return TangentHK(ds, dm, 0.0);
}

double quadratic_form(double alpha, double beta, const ScaledGaussianParams& p,
                      const CotangentHK& eta) {
    check_weights(alpha, beta);
    double q = quadratic_form_normalized(alpha, beta, p.sigma, eta) / p.kappa;
    return q + beta * p.kappa * eta.k * eta.k;
}

double quadratic_form_normalized(double alpha, double beta, const MatrixXd& sigma,
                                 const CotangentHK& eta) {
    // Gram forms keep every term exactly nonnegative:
    // tr(S^2 Sigma) = |L^T S|_F^2, tr((Sigma S)^2)... = |L^T S L|_F^2, Sigma = L L^T.
    Eigen::LLT<MatrixXd> llt(symmetrize(sigma));
    if (llt.info() != Eigen::Success)
        throw DomainError("quadratic_form: Sigma not SPD");
    MatrixXd L = llt.matrixL();
    MatrixXd LtS = L.transpose() * eta.S;
    double otto = 4.0 * LtS.squaredNorm() + eta.mu.squaredNorm();
    MatrixXd LtSL = LtS * L;
    VectorXd Ltmu = L.transpose() * eta.mu;
    double he = 2.0 * LtSL.squaredNorm() + Ltmu.squaredNorm();
    return alpha * otto + beta * he;
}

QuadCoefficients xi_from_eta(const ScaledGaussianParams& p, const CotangentHK& eta) {
    QuadCoefficients xi;
    xi.A = eta.S / p.kappa;
    xi.b = eta.mu / p.kappa;
    xi.c = eta.k - (eta.S.array() * p.sigma.array()).sum() / p.kappa;
    return xi;
}

OnsagerFormPair full_onsager_form(const ScaledGaussianParams& p, const CotangentHK& eta) {
    QuadCoefficients xi = xi_from_eta(p, eta);
    // Substitute x = m + R y with R = Sigma^{1/2} and y standard normal;
    // everything reduces to the moment identities below.
    MatrixXd R = sqrt_spd(p.sigma);
    MatrixXd RA = R * xi.A;
    MatrixXd C = symmetrize(RA * R);      // Sigma^{1/2} A Sigma^{1/2}
    VectorXd bt = R * xi.b;               // Sigma^{1/2} b

    // |grad xi|^2 = |2 A(x-m) + b|^2 -> 4 y.(R A A R) y + odd + |b|^2
    OnsagerFormPair out;
    out.otto = p.kappa * (4.0 * trace_moment(RA.transpose() * RA) + moment2(xi.b, xi.b));
    // xi^2 -> (y.C y)^2 + (bt.y)^2 + 2 c y.C y + c^2 (+ odd terms that vanish)
    out.hellinger = p.kappa * (quartic_moment(C, C) + moment2(bt, bt) +
                               2.0 * xi.c * trace_moment(C) + xi.c * xi.c);
    return out;
}

} // namespace hkgf
