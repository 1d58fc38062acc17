#ifndef HKGF_CSV_IO_HPP
#define HKGF_CSV_IO_HPP

#include <iosfwd>
#include <string>

#include "hkgf/descent.hpp"
#include "hkgf/flow.hpp"
#include "hkgf/potential.hpp"

namespace hkgf {

/// Trajectory CSV: t, sigma_ij (row-major), m_i, kappa, h_cov, h_mean,
/// d_cov, d_mean[, b_1..b_d]. One header row, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Descent CSV: k, kl_estimate, m_i, sigma_ij (row-major), kappa.
void write_descent_csv(std::ostream& os, const DescentResult& result);

/// Aligned comparison of several descent runs: k, kl_<label> per run.
void write_kl_comparison_csv(std::ostream& os, const std::vector<std::string>& labels,
                             const std::vector<DescentResult>& runs);

/// Logistic dataset CSV: header x_1..x_d,y; one row per sample.
LogisticData read_logistic_csv(const std::string& path, double reg_lambda,
                               bool include_intercept);
void write_logistic_csv(std::ostream& os, const LogisticData& data);

} // namespace hkgf

#endif
