#include "hkgf/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hkgf/errors.hpp"

namespace hkgf {

double asymmetry(const MatrixXd& M) {
    double scale = std::max(1.0, M.norm());
    return (M - M.transpose()).norm() / scale;
}

bool is_spd(const MatrixXd& M) {
    if (M.rows() != M.cols()) return false;
    if (asymmetry(M) > 1e-12) return false;
    Eigen::LLT<MatrixXd> llt(symmetrize(M));
    return llt.info() == Eigen::Success;
}

void require_spd(const MatrixXd& M, const std::string& name) {
    if (M.rows() != M.cols())
        throw DomainError(name + " is not square (" + std::to_string(M.rows()) + "x" +
                          std::to_string(M.cols()) + ")");
    if (asymmetry(M) > 1e-12)
        throw DomainError(name + " is not symmetric (relative asymmetry " +
                          std::to_string(asymmetry(M)) + ")");
    Eigen::LLT<MatrixXd> llt(symmetrize(M));
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(M), Eigen::EigenvaluesOnly);
        throw DomainError(name + " is not positive definite (smallest eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
}

double log_det_spd(const MatrixXd& M) {
    Eigen::LLT<MatrixXd> llt(symmetrize(M));
    if (llt.info() != Eigen::Success)
        throw DomainError("log_det_spd: Cholesky factorization failed");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

MatrixXd inverse_spd(const MatrixXd& M) {
    Eigen::LLT<MatrixXd> llt(symmetrize(M));
    if (llt.info() != Eigen::Success)
        throw DomainError("inverse_spd: Cholesky factorization failed");
    return symmetrize(llt.solve(MatrixXd::Identity(M.rows(), M.cols())));
}

MatrixXd sqrt_spd(const MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(M));
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw DomainError("sqrt_spd: matrix not positive definite (smallest eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()) + ")");
    return symmetrize(es.eigenvectors() *
                      es.eigenvalues().array().sqrt().matrix().asDiagonal() *
                      es.eigenvectors().transpose());
}

MatrixXd exp_sym(const MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(M));
    return symmetrize(es.eigenvectors() *
                      es.eigenvalues().array().exp().matrix().asDiagonal() *
                      es.eigenvectors().transpose());
}

double min_eigenvalue_sym(const MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(M), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_eigenvalue_sym(const MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(M), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double spectral_norm_sym(const MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(M), Eigen::EigenvaluesOnly);
    return es.eigenvalues().array().abs().maxCoeff();
}

double quad_form_inv(const MatrixXd& M, const VectorXd& x) {
    Eigen::LLT<MatrixXd> llt(symmetrize(M));
    if (llt.info() != Eigen::Success)
        throw DomainError("quad_form_inv: Cholesky factorization failed");
    return x.dot(llt.solve(x));
}

double trace_nsn(const MatrixXd& N, const MatrixXd& Sigma) {
    Eigen::LLT<MatrixXd> llt(symmetrize(Sigma));
    if (llt.info() != Eigen::Success)
        throw DomainError("trace_nsn: Cholesky factorization failed");
    MatrixXd LtN = llt.matrixL().toDenseMatrix().transpose() * N;
    return LtN.squaredNorm();
}

} // namespace hkgf
