// hkgf - Hellinger-Kantorovich Gaussian flows
//
// Subcommands: flow, descent, decay-report, convexity-scan, geodesic, verify.
// Each job is configured by one JSON document; outputs are CSV trajectories
// plus JSON summaries. Exit codes: 0 ok, 1 config error, 2 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "hkgf/acceptance.hpp"
#include "hkgf/csv_io.hpp"
#include "hkgf/decay.hpp"
#include "hkgf/descent.hpp"
#include "hkgf/errors.hpp"
#include "hkgf/flow.hpp"
#include "hkgf/gauss.hpp"
#include "hkgf/geometry.hpp"
#include "hkgf/json_io.hpp"

namespace fs = std::filesystem;
using namespace hkgf;

namespace {

int log_level() {
    const char* env = std::getenv("HKGF_LOG");
    if (!env) return 1;
    std::string v(env);
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[hkgf] " << msg << "\n";
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    return j;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << contents;
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
    return j.at(key);
}

FlowConfig flow_config_from(const json& j) {
    FlowConfig fc;
    fc.alpha = need(j, "alpha", "config").get<double>();
    fc.beta = need(j, "beta", "config").get<double>();
    fc.dt = need(j, "dt", "config").get<double>();
    fc.t_end = need(j, "t_end", "config").get<double>();
    if (j.contains("integrator")) {
        std::string s = j["integrator"].get<std::string>();
        if (s == "rk4") fc.integrator = FlowConfig::Integrator::rk4;
        else if (s == "euler") fc.integrator = FlowConfig::Integrator::euler;
        else throw ConfigError("config.integrator: expected \"rk4\" or \"euler\"");
    }
    if (j.contains("track_eigen")) fc.track_eigen = j["track_eigen"].get<bool>();
    if (j.contains("enforce_monotone")) fc.enforce_monotone = j["enforce_monotone"].get<bool>();
    fc.validate();
    return fc;
}

MomentEstimator estimator_from(const json& j, std::uint64_t default_seed) {
    if (!j.is_object()) throw ConfigError("estimator: expected an object");
    std::string mode = need(j, "mode", "estimator").get<std::string>();
    if (mode == "exact_gaussian") return MomentEstimator::exact();
    if (mode == "monte_carlo") {
        int n = j.value("n_mc", 100);
        std::uint64_t seed = j.value("seed", default_seed);
        return MomentEstimator::monte_carlo(n, seed);
    }
    if (mode == "gauss_hermite") return MomentEstimator::gauss_hermite(j.value("nodes_per_dim", 10));
    throw ConfigError("estimator.mode: unknown mode \"" + mode + "\"");
}

struct TargetSpec {
    bool is_gaussian = false;
    std::optional<GaussianTarget> gaussian;
    std::optional<PotentialTarget> potential;
};

TargetSpec target_from_config(const json& j, const std::string& where) {
    TargetSpec spec;
    if (j.contains("gamma")) {
        spec.is_gaussian = true;
        spec.gaussian = target_from_json(j);
        return spec;
    }
    if (j.contains("logistic")) {
        const json& l = j["logistic"];
        double reg = need(l, "reg_lambda", where + ".logistic").get<double>();
        bool intercept = l.value("include_intercept", false);
        LogisticData data;
        if (l.contains("csv")) {
            data = read_logistic_csv(l["csv"].get<std::string>(), reg, intercept);
        } else if (l.contains("synthetic")) {
            const json& s = l["synthetic"];
            data = accept::synthetic_logistic_data(s.value("n", 200), s.value("d", 2),
                                                   s.value("seed", 424242ULL), reg);
            data.include_intercept = intercept;
        } else {
            throw ConfigError(where + ".logistic: need \"csv\" or \"synthetic\"");
        }
        spec.potential = logistic_potential(data, l.value("prior_precision", 0.0));
        return spec;
    }
    throw ConfigError(where + ": expected a Gaussian target {gamma, n, varkappa} or {logistic: ...}");
}

int cmd_flow(const json& cfg, const fs::path& out_dir, std::uint64_t seed) {
    FlowConfig fc = flow_config_from(cfg);
    ScaledGaussianParams p0 = params_from_json(need(cfg, "p0", "config"));
    TargetSpec target = target_from_config(need(cfg, "target", "config"), "config.target");
    bool normalized = cfg.value("normalized", false);

    Trajectory traj;
    json summary;
    if (target.is_gaussian) {
        traj = normalized ? integrate_normalized(p0, fc, *target.gaussian)
                          : integrate_gaussian(p0, fc, *target.gaussian);
        const EnergySplit& e_end = traj.energy.back();
        double b_min0 = target.gaussian->normalized_spectrum(p0.sigma).minCoeff();
        DecayRates rates = refined_rates(fc.alpha, fc.beta, *target.gaussian, b_min0);
        DecayReport rep = verify_decay(traj, rates, DecayMode::refined);
        summary = json{{"final_energy", traj.points.back().kappa * e_end.normalized_total() +
                                            e_end.mass_term},
                       {"final_h_cov", e_end.h_cov},
                       {"final_h_mean", e_end.h_mean},
                       {"final_kappa", traj.points.back().kappa},
                       {"rates", to_json(rates)},
                       {"refined_decay", to_json(rep)}};
    } else {
        MomentEstimator est = cfg.contains("estimator")
                                  ? estimator_from(cfg["estimator"], seed)
                                  : MomentEstimator::monte_carlo(100, seed);
        fc.enforce_monotone = cfg.value("enforce_monotone", false);
        traj = integrate_potential(p0, fc, *target.potential, est);
        summary = json{{"final_free_energy", traj.kl_estimate.back()},
                       {"final_kappa", traj.points.back().kappa}};
    }
    std::ofstream csv(out_dir / "trajectory.csv");
    write_trajectory_csv(csv, traj);
    summary["points"] = traj.size();
    summary["final_point"] = to_json(traj.points.back());
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    info("flow: wrote " + (out_dir / "trajectory.csv").string());
    return 0;
}

int cmd_descent(const json& cfg, const fs::path& out_dir, std::uint64_t seed) {
    DescentConfig dc;
    dc.alpha = need(cfg, "alpha", "config").get<double>();
    dc.beta = need(cfg, "beta", "config").get<double>();
    dc.tau = need(cfg, "tau", "config").get<double>();
    dc.n_steps = need(cfg, "n_steps", "config").get<int>();
    dc.n_mc = cfg.value("n_mc", 1);
    dc.resample_midstep = cfg.value("resample_midstep", false);
    dc.seed = cfg.value("seed", seed);
    dc.track_mass = cfg.value("track_mass", false);
    if (cfg.contains("estimator")) {
        std::string mode = need(cfg["estimator"], "mode", "estimator").get<std::string>();
        if (mode == "exact_gaussian") dc.estimator_mode = MomentEstimator::Mode::exact_gaussian;
        else if (mode == "monte_carlo") dc.estimator_mode = MomentEstimator::Mode::monte_carlo;
        else if (mode == "gauss_hermite") dc.estimator_mode = MomentEstimator::Mode::gauss_hermite;
        else throw ConfigError("estimator.mode: unknown mode \"" + mode + "\"");
        dc.n_mc = cfg["estimator"].value("n_mc", dc.n_mc);
        dc.gh_nodes = cfg["estimator"].value("nodes_per_dim", dc.gh_nodes);
    }
    dc.validate();

    ScaledGaussianParams p0 = params_from_json(need(cfg, "p0", "config"));
    TargetSpec target = target_from_config(need(cfg, "target", "config"), "config.target");
    PotentialTarget pot = target.is_gaussian ? PotentialTarget::from_gaussian(*target.gaussian)
                                             : *target.potential;

    json summary;
    if (cfg.value("compare_geometries", false)) {
        std::vector<std::string> labels = {"bwfr", "fr", "bw"};
        std::vector<DescentResult> runs;
        for (auto [a, b] : {std::pair{dc.alpha, dc.beta}, {0.0, dc.beta}, {dc.alpha, 0.0}}) {
            DescentConfig c2 = dc;
            c2.alpha = a;
            c2.beta = b;
            runs.push_back(run_descent(c2, p0, pot));
        }
        std::ofstream csv(out_dir / "kl_comparison.csv");
        write_kl_comparison_csv(csv, labels, runs);
        std::ofstream main_csv(out_dir / "descent.csv");
        write_descent_csv(main_csv, runs[0]);
        summary["final_kl"] = json{{"bwfr", runs[0].steps.back().kl_estimate},
                                   {"fr", runs[1].steps.back().kl_estimate},
                                   {"bw", runs[2].steps.back().kl_estimate}};
        summary["fitted_rate"] = runs[0].fitted_rate;
        summary["final_point"] = to_json(runs[0].final());
        summary["precision_conversions"] = runs[0].conversions;
    } else {
        DescentResult res = run_descent(dc, p0, pot);
        std::ofstream csv(out_dir / "descent.csv");
        write_descent_csv(csv, res);
        summary["final_kl"] = res.steps.back().kl_estimate;
        summary["fitted_rate"] = res.fitted_rate;
        summary["final_point"] = to_json(res.final());
        summary["precision_conversions"] = res.conversions;
    }
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    info("descent: wrote " + (out_dir / "descent.csv").string());
    return 0;
}

int cmd_decay_report(const json& cfg, const fs::path& out_dir, std::uint64_t) {
    FlowConfig fc = flow_config_from(cfg);
    ScaledGaussianParams p0 = params_from_json(need(cfg, "p0", "config"));
    GaussianTarget target = target_from_json(need(cfg, "target", "config"));
    if (std::abs(p0.kappa - 1.0) > 1e-12)
        throw ConfigError("decay-report runs the normalized flow; p0.kappa must be 1");

    Trajectory traj = integrate_normalized(p0, fc, target);
    double b_min0 = target.normalized_spectrum(p0.sigma).minCoeff();
    DecayRates rates = refined_rates(fc.alpha, fc.beta, target, b_min0);
    double e0 = traj.energy.front().normalized_total();
    PlConstants sub = pl_constants(fc.alpha, fc.beta, target, std::max(e0, 1e-6));

    json report;
    report["rates"] = to_json(rates);
    report["pl_sublevel"] = json{{"E", e0}, {"c_cov", sub.c_cov}, {"c_mean", sub.c_mean}};

    DecayRates pl_rates = rates;
    json per_mode = json::object();
    {
        DecayReport r = verify_decay(traj, rates, DecayMode::refined);
        per_mode["refined"] = to_json(r);
    }
    {
        DecayReport r = verify_decay(traj, pl_rates, DecayMode::pl_global);
        per_mode["pl_global"] = to_json(r);
    }
    {
        DecayRates r2 = rates;
        r2.c_pl_cov = sub.c_cov;
        r2.c_pl_mean = sub.c_mean;
        DecayReport r = verify_decay(traj, r2, DecayMode::pl_sublevel);
        per_mode["pl_sublevel"] = to_json(r);
    }
    report["modes"] = per_mode;
    write_file(out_dir / "decay_report.json", report.dump(2) + "\n");
    std::ofstream csv(out_dir / "trajectory.csv");
    write_trajectory_csv(csv, traj);
    info("decay-report: wrote " + (out_dir / "decay_report.json").string());
    return 0;
}

int cmd_convexity_scan(const json& cfg, const fs::path& out_dir, std::uint64_t seed) {
    double alpha = need(cfg, "alpha", "config").get<double>();
    double beta = need(cfg, "beta", "config").get<double>();
    GaussianTarget target = target_from_json(need(cfg, "target", "config"));
    ScanConfig sc;
    sc.n_samples = cfg.value("n_samples", 10000);
    sc.seed = cfg.value("seed", seed);
    if (cfg.contains("sampler")) {
        sc.sigma_log_range = cfg["sampler"].value("sigma_log_range", sc.sigma_log_range);
        sc.mean_radius = cfg["sampler"].value("mean_radius", sc.mean_radius);
    }
    ScanReport rep = convexity_scan(alpha, beta, target, sc);
    json out = to_json(rep);
    if (beta == 0.0) out["otto_lower_bound"] = alpha * min_eigenvalue_sym(target.gamma_inv);
    if (cfg.contains("escape_radii")) {
        std::vector<double> radii = cfg["escape_radii"].get<std::vector<double>>();
        out["mean_escape_quotients"] = mean_escape_quotients(alpha, beta, target, radii);
    }
    write_file(out_dir / "scan_report.json", out.dump(2) + "\n");
    info("convexity-scan: min quotient " + std::to_string(rep.min_quotient));
    return 0;
}

int cmd_geodesic(const json& cfg, const fs::path& out_dir, std::uint64_t) {
    double alpha = need(cfg, "alpha", "config").get<double>();
    double beta = need(cfg, "beta", "config").get<double>();
    double s_end = cfg.value("s_end", 1.0);
    double ds = cfg.value("ds", 1e-3);
    bool normalized = cfg.value("normalized", true);
    GeodesicMode mode = normalized ? GeodesicMode::normalized : GeodesicMode::scaled;
    GeodesicState st{params_from_json(need(cfg, "p0", "config")),
                     cotangent_from_json(need(cfg, "eta0", "config"))};

    const int n_out = cfg.value("n_out", 100);
    std::ofstream csv(out_dir / "geodesic.csv");
    csv << std::setprecision(17) << "s,hamiltonian,kappa,k,sigma_min_eig\n";
    double h0 = geodesic_hamiltonian(alpha, beta, st, mode);
    GeodesicState cur = st;
    double drift = 0.0;
    for (int i = 0; i <= n_out; ++i) {
        double s = s_end * i / n_out;
        double h = geodesic_hamiltonian(alpha, beta, cur, mode);
        drift = std::max(drift, std::abs(h - h0));
        csv << s << "," << h << "," << cur.point.kappa << "," << cur.costate.k << ","
            << min_eigenvalue_sym(cur.point.sigma) << "\n";
        if (i < n_out) cur = geodesic_integrate(alpha, beta, cur, s_end / n_out, ds, mode);
    }
    json summary{{"hamiltonian_initial", h0},
                 {"hamiltonian_drift", drift},
                 {"final_point", to_json(cur.point)}};
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    info("geodesic: Hamiltonian drift " + std::to_string(drift));
    return 0;
}

int cmd_verify(const fs::path& out_dir, const std::string& filter) {
    auto results = accept::run_all(filter);
    if (results.empty()) {
        std::cerr << "no criteria match filter \"" << filter << "\"\n";
        return 1;
    }
    bool all = true;
    json per = json::array();
    for (const auto& r : results) {
        all = all && r.passed;
        std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name;
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << "  [" << std::fixed << std::setprecision(1) << r.seconds << "s]\n";
        std::cout.unsetf(std::ios::fixed);
        per.push_back(json{{"name", r.name},
                           {"passed", r.passed},
                           {"detail", r.detail},
                           {"seconds", r.seconds}});
    }
    json out{{"passed", all}, {"criteria", per}};
    write_file(out_dir / "verify.json", out.dump(2) + "\n");
    return all ? 0 : 2;
}

struct Job {
    std::string command;
    std::string config_path;
    fs::path out_dir;
    std::uint64_t seed;
};

int run_job(const Job& job) {
    fs::create_directories(job.out_dir);
    if (job.command == "verify") return cmd_verify(job.out_dir, "");
    json cfg = load_config(job.config_path);
    if (job.command == "flow") return cmd_flow(cfg, job.out_dir, job.seed);
    if (job.command == "descent") return cmd_descent(cfg, job.out_dir, job.seed);
    if (job.command == "decay-report") return cmd_decay_report(cfg, job.out_dir, job.seed);
    if (job.command == "convexity-scan") return cmd_convexity_scan(cfg, job.out_dir, job.seed);
    if (job.command == "geodesic") return cmd_geodesic(cfg, job.out_dir, job.seed);
    throw ConfigError("unknown command " + job.command);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hellinger-Kantorovich Boltzmann gradient flows on Gaussian measures"};
    app.require_subcommand(1);

    std::vector<std::string> configs;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string filter;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", configs, "JSON config file(s)");
        if (needs_config) opt->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "base RNG seed");
        sub->add_option("--jobs", jobs, "parallel jobs across configs")->check(CLI::PositiveNumber);
    };

    add_common(app.add_subcommand("flow", "integrate a reduced gradient flow"), true);
    add_common(app.add_subcommand("descent", "run the discrete-time Gaussian gradient descent"), true);
    add_common(app.add_subcommand("decay-report", "integrate and verify decay estimates"), true);
    add_common(app.add_subcommand("convexity-scan", "scan metric-Hessian Rayleigh quotients"), true);
    add_common(app.add_subcommand("geodesic", "integrate the geodesic Hamiltonian system"), true);
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--out", out_dir, "output directory");
    verify->add_option("--filter", filter, "run only criteria whose name contains this");

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    try {
        if (command == "verify") {
            fs::create_directories(out_dir);
            return cmd_verify(out_dir, filter);
        }
        std::vector<Job> batch;
        for (std::size_t i = 0; i < configs.size(); ++i) {
            fs::path dir = out_dir;
            if (configs.size() > 1) dir /= fs::path(configs[i]).stem();
            batch.push_back(Job{command, configs[i], dir, seed + i});
        }
        if (jobs <= 1 || batch.size() <= 1) {
            for (const Job& j : batch) {
                int rc = run_job(j);
                if (rc != 0) return rc;
            }
            return 0;
        }
        std::mutex mu;
        std::atomic<int> next{0};
        std::atomic<int> worst{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min<int>(jobs, static_cast<int>(batch.size())); ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < static_cast<int>(batch.size()); i = next++) {
                    try {
                        int rc = run_job(batch[i]);
                        int cur = worst.load();
                        while (rc > cur && !worst.compare_exchange_weak(cur, rc)) {}
                    } catch (const std::exception& e) {
                        std::scoped_lock lk(mu);
                        std::cerr << "error in " << batch[i].config_path << ": " << e.what() << "\n";
                        worst = 2;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        return worst.load();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IntegrationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
