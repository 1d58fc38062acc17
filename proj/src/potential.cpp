#include "hkgf/potential.hpp"

#include <cmath>

#include "hkgf/errors.hpp"

namespace hkgf {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

double log1p_exp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

PotentialTarget PotentialTarget::from_gaussian(const GaussianTarget& target) {
    PotentialTarget pot;
    pot.kind = Kind::gaussian_quadratic;
    pot.dim = target.dim();
    pot.gaussian = target;
    pot.normalizer_known = true;
    pot.lambda_convexity = 1.0 / max_eigenvalue_sym(target.gamma);
    const double c0 = 0.5 * (target.dim() * kLog2Pi + target.log_det_gamma);
    MatrixXd gi = target.gamma_inv;
    VectorXd n = target.n;
    pot.value = [gi, n, c0](const VectorXd& x) {
        VectorXd w = x - n;
        return 0.5 * w.dot(gi * w) + c0;
    };
    pot.grad = [gi, n](const VectorXd& x) { return VectorXd(gi * (x - n)); };
    pot.hess = [gi](const VectorXd&) { return gi; };
    return pot;
}

PotentialTarget logistic_potential(const LogisticData& data, double prior_precision) {
    if (data.labels.size() != data.features.rows())
        throw DomainError("logistic data: features/labels length mismatch (" +
                          std::to_string(data.features.rows()) + " vs " +
                          std::to_string(data.labels.size()) + ")");
    if (data.n_samples() < 1) throw DomainError("logistic data: need at least one sample");
    if (!(data.reg_lambda > 0.0)) throw DomainError("logistic data: reg_lambda must be positive");
    for (int i = 0; i < data.labels.size(); ++i)
        if (data.labels(i) != 0 && data.labels(i) != 1)
            throw DomainError("logistic data: labels must be 0/1, row " + std::to_string(i));
    if (prior_precision < 0.0) throw DomainError("logistic prior precision must be >= 0");

    const int d = data.param_dim();
    const double w = 1.0 / (data.n_samples() * data.reg_lambda);
    // Copy the data into the closures; rows are extended by the intercept column.
    MatrixXd X(data.n_samples(), d);
    X.leftCols(data.n_features()) = data.features;
    if (data.include_intercept) X.col(d - 1).setOnes();
    VectorXd y = data.labels.cast<double>();

    PotentialTarget pot;
    pot.kind = PotentialTarget::Kind::logistic_regression;
    pot.dim = d;
    pot.normalizer_known = false;
    if (prior_precision > 0.0) pot.lambda_convexity = prior_precision;
    pot.value = [X, y, w, prior_precision](const VectorXd& theta) {
        VectorXd z = X * theta;
        double v = 0.0;
        for (int i = 0; i < z.size(); ++i) v += -y(i) * z(i) + log1p_exp(z(i));
        return w * v + 0.5 * prior_precision * theta.squaredNorm();
    };
    pot.grad = [X, y, w, prior_precision](const VectorXd& theta) {
        VectorXd z = X * theta;
        VectorXd r(z.size());
        for (int i = 0; i < z.size(); ++i) r(i) = sigmoid(z(i)) - y(i);
        return VectorXd(w * (X.transpose() * r) + prior_precision * theta);
    };
    pot.hess = [X, w, prior_precision, d](const VectorXd& theta) {
        VectorXd z = X * theta;
        VectorXd s(z.size());
        for (int i = 0; i < z.size(); ++i) {
            double p = sigmoid(z(i));
            s(i) = p * (1.0 - p);
        }
        MatrixXd H = w * (X.transpose() * s.asDiagonal() * X);
        H += prior_precision * MatrixXd::Identity(d, d);
        return MatrixXd(symmetrize(H));
    };
    return pot;
}

} // namespace hkgf
