#include "hkgf/json_io.hpp"

#include "hkgf/errors.hpp"

namespace hkgf {

json matrix_to_json(const MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

MatrixXd matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError(where + ": expected a nested array (row-major matrix)");
    const auto rows = j.size();
    const auto cols = j[0].size();
    MatrixXd M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ConfigError(where + ": ragged matrix at row " + std::to_string(i));
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number())
                throw ConfigError(where + ": non-numeric entry at (" + std::to_string(i) + "," +
                                  std::to_string(c) + ")");
            M(i, c) = j[i][c].get<double>();
        }
    }
    return M;
}

VectorXd vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array");
    VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ConfigError(where + ": non-numeric entry at index " + std::to_string(i));
        v(i) = j[i].get<double>();
    }
    return v;
}

json to_json(const ScaledGaussianParams& p) {
    return json{{"sigma", matrix_to_json(p.sigma)}, {"m", vector_to_json(p.m)}, {"kappa", p.kappa}};
}

json to_json(const SimpleCoords& q) {
    return json{{"A", matrix_to_json(q.A)}, {"b", vector_to_json(q.b)}, {"c", q.c}};
}

json to_json(const GaussianTarget& t) {
    return json{{"gamma", matrix_to_json(t.gamma)}, {"n", vector_to_json(t.n)},
                {"varkappa", t.varkappa}};
}

json to_json(const CotangentHK& eta) {
    return json{{"S", matrix_to_json(eta.S)}, {"mu", vector_to_json(eta.mu)}, {"k", eta.k}};
}

json to_json(const EnergySplit& e) {
    return json{{"h_cov", e.h_cov}, {"h_mean", e.h_mean}, {"mass_term", e.mass_term}};
}

json to_json(const DissipationSplit& d) {
    return json{{"d_cov", d.d_cov}, {"d_mean", d.d_mean}};
}

json to_json(const ScanReport& r) {
    return json{{"alpha", r.alpha},
                {"beta", r.beta},
                {"n_samples", r.n_samples},
                {"seed", r.seed},
                {"min_quotient", r.min_quotient},
                {"witness",
                 json{{"sigma", matrix_to_json(r.witness.sigma)},
                      {"m", vector_to_json(r.witness.m)},
                      {"eta", to_json(r.witness.eta)},
                      {"quotient", r.witness.quotient}}},
                {"quotient_deciles", r.deciles}};
}

json to_json(const DecayRates& r) {
    json j{{"nu_cov", r.nu_cov},
           {"nu_mean", r.nu_mean},
           {"prefactor_cov", r.prefactor_cov},
           {"prefactor_mean", r.prefactor_mean},
           {"c_pl_cov", r.c_pl_cov},
           {"c_pl_mean", r.c_pl_mean}};
    if (r.gamma_loglambda) j["gamma_loglambda"] = *r.gamma_loglambda;
    return j;
}

namespace {
const char* mode_name(DecayMode m) {
    switch (m) {
        case DecayMode::pl_global: return "pl_global";
        case DecayMode::pl_sublevel: return "pl_sublevel";
        case DecayMode::refined: return "refined";
        case DecayMode::log_lambda: return "log_lambda";
    }
    return "?";
}
} // namespace

json to_json(const DecayReport& r) {
    return json{{"mode", mode_name(r.mode)},
                {"vacuous", r.vacuous},
                {"max_violation", r.max_violation},
                {"passed", r.passed},
                {"fitted_rate_cov", r.fitted_rate_cov},
                {"fitted_rate_mean", r.fitted_rate_mean},
                {"fitted_rate_energy", r.fitted_rate_energy}};
}

namespace {
const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
    return j.at(key);
}
double need_number(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}
} // namespace

ScaledGaussianParams params_from_json(const json& j) {
    MatrixXd sigma = matrix_from_json(need(j, "sigma", "params"), "params.sigma");
    VectorXd m = vector_from_json(need(j, "m", "params"), "params.m");
    double kappa = j.contains("kappa") ? need_number(j, "kappa", "params") : 1.0;
    return ScaledGaussianParams(sigma, m, kappa);
}

SimpleCoords simple_from_json(const json& j) {
    return SimpleCoords(matrix_from_json(need(j, "A", "simple"), "simple.A"),
                        vector_from_json(need(j, "b", "simple"), "simple.b"),
                        need_number(j, "c", "simple"));
}

GaussianTarget target_from_json(const json& j) {
    MatrixXd gamma = matrix_from_json(need(j, "gamma", "target"), "target.gamma");
    VectorXd n = vector_from_json(need(j, "n", "target"), "target.n");
    double vk = j.contains("varkappa") ? need_number(j, "varkappa", "target") : 1.0;
    return GaussianTarget(gamma, n, vk);
}

CotangentHK cotangent_from_json(const json& j) {
    MatrixXd S = matrix_from_json(need(j, "S", "eta"), "eta.S");
    VectorXd mu = vector_from_json(need(j, "mu", "eta"), "eta.mu");
    double k = j.contains("k") ? need_number(j, "k", "eta") : 0.0;
    return CotangentHK(S, mu, k);
}

} // namespace hkgf
