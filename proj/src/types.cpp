#include "hkgf/types.hpp"

#include <Eigen/Eigenvalues>

#include "hkgf/errors.hpp"

namespace hkgf {

ScaledGaussianParams::ScaledGaussianParams(MatrixXd sigma_in, VectorXd m_in, double kappa_in)
    : sigma(std::move(sigma_in)), m(std::move(m_in)), kappa(kappa_in) {
    require_spd(sigma, "Sigma");
    sigma = symmetrize(sigma);
    if (sigma.rows() != m.size())
        throw DomainError("Sigma/m dimension mismatch (" + std::to_string(sigma.rows()) +
                          " vs " + std::to_string(m.size()) + ")");
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw DomainError("kappa must be positive, got " + std::to_string(kappa));
}

ScaledGaussianParams ScaledGaussianParams::standard(int d) {
    return ScaledGaussianParams(MatrixXd::Identity(d, d), VectorXd::Zero(d), 1.0);
}

SimpleCoords::SimpleCoords(MatrixXd A_in, VectorXd b_in, double c_in)
    : A(std::move(A_in)), b(std::move(b_in)), c(c_in) {
    require_spd(A, "A");
    A = symmetrize(A);
    if (A.rows() != b.size())
        throw DomainError("A/b dimension mismatch");
    if (!std::isfinite(c)) throw DomainError("c must be finite");
}

GaussianTarget::GaussianTarget(MatrixXd gamma_in, VectorXd n_in, double varkappa_in)
    : gamma(std::move(gamma_in)), n(std::move(n_in)), varkappa(varkappa_in) {
    require_spd(gamma, "Gamma");
    gamma = symmetrize(gamma);
    if (gamma.rows() != n.size())
        throw DomainError("Gamma/n dimension mismatch");
    if (!(varkappa > 0.0) || !std::isfinite(varkappa))
        throw DomainError("varkappa must be positive, got " + std::to_string(varkappa));

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gamma);
    const VectorXd& ev = es.eigenvalues();
    gamma_inv = symmetrize(es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                           es.eigenvectors().transpose());
    gamma_inv_sqrt = symmetrize(es.eigenvectors() * ev.array().rsqrt().matrix().asDiagonal() *
                                es.eigenvectors().transpose());
    log_det_gamma = ev.array().log().sum();
}

GaussianTarget GaussianTarget::standard(int d) {
    return GaussianTarget(MatrixXd::Identity(d, d), VectorXd::Zero(d), 1.0);
}

VectorXd GaussianTarget::normalized_spectrum(const MatrixXd& sigma) const {
    MatrixXd B = symmetrize(gamma_inv_sqrt * sigma * gamma_inv_sqrt);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(B, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

CotangentHK::CotangentHK(MatrixXd S_in, VectorXd mu_in, double k_in)
    : S(std::move(S_in)), mu(std::move(mu_in)), k(k_in) {
    if (asymmetry(S) > 1e-12)
        throw DomainError("cotangent S is not symmetric (relative asymmetry " +
                          std::to_string(asymmetry(S)) + ")");
    S = symmetrize(S);
    if (S.rows() != mu.size())
        throw DomainError("S/mu dimension mismatch");
}

CotangentHK CotangentHK::zero(int d) {
    return CotangentHK(MatrixXd::Zero(d, d), VectorXd::Zero(d), 0.0);
}

} // namespace hkgf
