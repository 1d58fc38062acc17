#ifndef HKGF_ACCEPTANCE_HPP
#define HKGF_ACCEPTANCE_HPP

#include <string>
#include <vector>

#include "hkgf/potential.hpp"

namespace hkgf::accept {

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Names of all verification criteria, in execution order.
std::vector<std::string> criterion_names();

/// Run one criterion by name; throws ConfigError on an unknown name.
CriterionResult run_criterion(const std::string& name);

/// Run all criteria whose name contains `filter` (all when empty).
std::vector<CriterionResult> run_all(const std::string& filter = "");

/// Synthetic logistic-regression dataset used by the verification suite and
/// the CLI examples (fixed generator for a given seed).
LogisticData synthetic_logistic_data(int n_samples, int dim, std::uint64_t seed,
                                     double reg_lambda);

} // namespace hkgf::accept

#endif
