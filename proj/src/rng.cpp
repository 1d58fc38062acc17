#include "hkgf/rng.hpp"

#include <Eigen/QR>

namespace hkgf {

Eigen::MatrixXd Rng::random_spd(int d, double log_range) {
    Eigen::MatrixXd G(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) = normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd ev(d);
    for (int i = 0; i < d; ++i) ev(i) = std::exp(uniform(-log_range, log_range));
    Eigen::MatrixXd M = Q * ev.asDiagonal() * Q.transpose();
    return 0.5 * (M + M.transpose());
}

} // namespace hkgf
