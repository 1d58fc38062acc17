#ifndef HKGF_POTENTIAL_HPP
#define HKGF_POTENTIAL_HPP

#include <functional>
#include <optional>

#include "hkgf/types.hpp"

namespace hkgf {

/// Target measure pi proportional to exp(-V) described through pointwise
/// oracles for V, grad V and hess V. When normalizer_known is set, exp(-V)
/// integrates to one and relative entropies against pi are computable without
/// an unknown additive constant.
struct PotentialTarget {
    enum class Kind { gaussian_quadratic, logistic_regression, custom };

    Kind kind = Kind::custom;
    int dim = 0;
    std::function<double(const VectorXd&)> value;
    std::function<VectorXd(const VectorXd&)> grad;
    std::function<MatrixXd(const VectorXd&)> hess;
    std::optional<double> lambda_convexity;
    bool normalizer_known = false;

    /// Set for gaussian_quadratic; enables exact moments and closed-form KL.
    std::optional<GaussianTarget> gaussian;

    /// V(x) = (x-n).Gamma^{-1}(x-n)/2 + log det(2 pi Gamma)/2, so that
    /// exp(-V) = G(Gamma, n) exactly (normalizer known).
    static PotentialTarget from_gaussian(const GaussianTarget& target);
};

/// Logistic-regression dataset: one row of `features` per sample, binary
/// labels, entropic regularization weight lambda and optional intercept.
struct LogisticData {
    MatrixXd features;        // N x d
    Eigen::VectorXi labels;   // in {0, 1}
    double reg_lambda = 1.0;
    bool include_intercept = false;

    int n_samples() const { return static_cast<int>(features.rows()); }
    int n_features() const { return static_cast<int>(features.cols()); }
    /// Parameter dimension (d, or d+1 with intercept appended last).
    int param_dim() const { return n_features() + (include_intercept ? 1 : 0); }
};

/// V(theta) = (1/(N lambda)) sum_i [ -y_i z_i + log(1 + e^{z_i}) ]
///          + (prior_precision/2) |theta|^2,
/// z_i = theta.x_i (+ theta_0). Overflow-safe log1p-exp evaluation; the
/// Hessian is PSD everywhere, and strictly positive lambda-convexity is
/// supplied by the optional quadratic prior.
PotentialTarget logistic_potential(const LogisticData& data, double prior_precision = 0.0);

/// Numerically stable log(1 + e^z) and sigmoid.
double log1p_exp(double z);
double sigmoid(double z);

} // namespace hkgf

#endif
