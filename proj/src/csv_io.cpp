#include "hkgf/csv_io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hkgf/errors.hpp"

namespace hkgf {

namespace {
void set_precision(std::ostream& os) { os << std::setprecision(17); }
} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.size() == 0) throw ConfigError("write_trajectory_csv: empty trajectory");
    set_precision(os);
    const int d = traj.points[0].dim();
    const bool has_eigen = !traj.eigen_track.empty();
    const bool has_split = !traj.energy.empty();

    os << "t";
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) os << ",sigma_" << i << j;
    for (int i = 1; i <= d; ++i) os << ",m_" << i;
    os << ",kappa,h_cov,h_mean,d_cov,d_mean";
    if (has_eigen)
        for (int i = 1; i <= d; ++i) os << ",b_" << i;
    os << "\n";

    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << traj.times[k];
        const ScaledGaussianParams& p = traj.points[k];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) os << "," << p.sigma(i, j);
        for (int i = 0; i < d; ++i) os << "," << p.m(i);
        os << "," << p.kappa;
        if (has_split) {
            os << "," << traj.energy[k].h_cov << "," << traj.energy[k].h_mean << ","
               << traj.dissipation[k].d_cov << "," << traj.dissipation[k].d_mean;
        } else {
            // potential-target runs: kl_estimate carries the energy
            double kl = traj.kl_estimate.empty() ? 0.0 : traj.kl_estimate[k];
            os << "," << kl << ",0,0,0";
        }
        if (has_eigen)
            for (int i = 0; i < d; ++i) os << "," << traj.eigen_track[k](i);
        os << "\n";
    }
}

void write_descent_csv(std::ostream& os, const DescentResult& result) {
    if (result.steps.empty()) throw ConfigError("write_descent_csv: empty run");
    set_precision(os);
    const int d = static_cast<int>(result.steps[0].m.size());
    os << "k,kl_estimate";
    for (int i = 1; i <= d; ++i) os << ",m_" << i;
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) os << ",sigma_" << i << j;
    os << ",kappa\n";
    for (const DescentRecord& r : result.steps) {
        os << r.step << "," << r.kl_estimate;
        for (int i = 0; i < d; ++i) os << "," << r.m(i);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) os << "," << r.sigma(i, j);
        os << "," << r.kappa << "\n";
    }
}

void write_kl_comparison_csv(std::ostream& os, const std::vector<std::string>& labels,
                             const std::vector<DescentResult>& runs) {
    if (labels.size() != runs.size() || runs.empty())
        throw ConfigError("write_kl_comparison_csv: label/run mismatch");
    set_precision(os);
    std::size_t n = 0;
    for (const auto& r : runs) n = std::max(n, r.steps.size());
    os << "k";
    for (const auto& l : labels) os << ",kl_" << l;
    os << "\n";
    for (std::size_t k = 0; k < n; ++k) {
        os << k;
        for (const auto& r : runs) {
            os << ",";
            if (k < r.steps.size()) os << r.steps[k].kl_estimate;
        }
        os << "\n";
    }
}

LogisticData read_logistic_csv(const std::string& path, double reg_lambda,
                               bool include_intercept) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open logistic dataset: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty logistic dataset: " + path);

    // header x_1,...,x_d,y
    int d = 0;
    {
        std::stringstream header(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(header, col, ',')) cols.push_back(col);
        if (cols.size() < 2 || cols.back() != "y")
            throw ConfigError(path + ": expected header x_1..x_d,y");
        d = static_cast<int>(cols.size()) - 1;
    }

    std::vector<VectorXd> rows;
    std::vector<int> labels;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        VectorXd x(d);
        for (int i = 0; i < d; ++i) {
            if (!std::getline(ss, cell, ','))
                throw ConfigError(path + ":" + std::to_string(line_no) + ": too few columns");
            x(i) = std::stod(cell);
        }
        if (!std::getline(ss, cell, ','))
            throw ConfigError(path + ":" + std::to_string(line_no) + ": missing label");
        int y = std::stoi(cell);
        rows.push_back(x);
        labels.push_back(y);
    }
    if (rows.empty()) throw ConfigError(path + ": no data rows");

    LogisticData data;
    data.features.resize(static_cast<Eigen::Index>(rows.size()), d);
    data.labels.resize(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.features.row(static_cast<Eigen::Index>(i)) = rows[i];
        data.labels(static_cast<Eigen::Index>(i)) = labels[i];
    }
    data.reg_lambda = reg_lambda;
    data.include_intercept = include_intercept;
    return data;
}

void write_logistic_csv(std::ostream& os, const LogisticData& data) {
    set_precision(os);
    const int d = data.n_features();
    for (int i = 1; i <= d; ++i) os << "x_" << i << ",";
    os << "y\n";
    for (int r = 0; r < data.n_samples(); ++r) {
        for (int i = 0; i < d; ++i) os << data.features(r, i) << ",";
        os << data.labels(r) << "\n";
    }
}

} // namespace hkgf
