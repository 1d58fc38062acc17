#include <doctest.h>

#include <cmath>

#include "hkgf/acceptance.hpp"
#include "hkgf/descent.hpp"
#include "hkgf/errors.hpp"
#include "hkgf/flow.hpp"
#include "hkgf/gauss.hpp"
#include "hkgf/rng.hpp"

using namespace hkgf;

namespace {

PotentialTarget constant_hessian_potential(int d, double h) {
    PotentialTarget pot;
    pot.kind = PotentialTarget::Kind::custom;
    pot.dim = d;
    pot.value = [h](const VectorXd& x) { return 0.5 * h * x.squaredNorm(); };
    pot.grad = [h](const VectorXd& x) { return VectorXd(h * x); };
    pot.hess = [h, d](const VectorXd&) { return MatrixXd(h * MatrixXd::Identity(d, d)); };
    return pot;
}

} // namespace

TEST_SUITE_BEGIN("descent");

TEST_CASE("config validation enforces the convex-combination condition") {
    DescentConfig cfg;
    cfg.tau = 0.5;
    cfg.beta = 2.0;   // tau*beta = 1
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.beta = 1.9;
    CHECK_NOTHROW(cfg.validate());
    cfg.tau = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("fr_step: convex combination of precisions, descent direction") {
    // d=1, tau*beta = 0.5, Sigma^{-1} = 1, E[hess] = 3 -> precision 2
    PotentialTarget pot = constant_hessian_potential(1, 3.0);
    MomentEstimator est = MomentEstimator::monte_carlo(1, 7);   // hessian is constant
    DescentState st = DescentState::from_params(ScaledGaussianParams::standard(1));
    fr_step(0.5, 1.0, st, est, pot);
    CHECK(st.prec()(0, 0) == doctest::Approx(2.0).epsilon(1e-14));

    // the mean moves against the gradient with the updated covariance
    DescentState st2 = DescentState::from_params(
        ScaledGaussianParams(MatrixXd::Identity(1, 1), VectorXd::Ones(1), 1.0));
    MomentEstimator exact = MomentEstimator::monte_carlo(1, 8);
    fr_step(0.1, 1.0, st2, exact, pot);
    CHECK(st2.m(0) < 1.0);
}

TEST_CASE("fr_step and bw_step fix the Gaussian optimum") {
    Rng rng(101);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    PotentialTarget pot = PotentialTarget::from_gaussian(t);
    MomentEstimator est = MomentEstimator::exact();

    DescentState st = DescentState::from_params(ScaledGaussianParams(t.gamma, t.n, 1.0));
    fr_step(0.1, 1.0, st, est, pot);
    CHECK((st.covariance() - t.gamma).norm() < 1e-13);
    CHECK((st.m - t.n).norm() < 1e-13);
    bw_step(0.1, 1.0, st, est, pot);
    CHECK((st.covariance() - t.gamma).norm() < 1e-13);
    CHECK((st.m - t.n).norm() < 1e-13);
}

TEST_CASE("bw_step: identity conjugation when the Hessian matches the precision") {
    PotentialTarget pot = constant_hessian_potential(1, 1.0);
    ScaledGaussianParams p0(MatrixXd::Identity(1, 1), 2.0 * VectorXd::Ones(1), 1.0);
    // duplicate the estimator stream to know the sampled gradient
    MomentEstimator probe = MomentEstimator::monte_carlo(1, 9);
    double g_hat = probe.estimate(p0, pot).grad(0);
    MomentEstimator est = MomentEstimator::monte_carlo(1, 9);
    DescentState st = DescentState::from_params(p0);
    bw_step(0.1, 1.0, st, est, pot);
    CHECK(st.covariance()(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(st.m(0) == doctest::Approx(2.0 - 0.1 * g_hat).epsilon(1e-14));
}

TEST_CASE("mass step: fixed point, beta = 0, and closed-form consistency") {
    Rng rng(102);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    PotentialTarget pot = PotentialTarget::from_gaussian(t);
    MomentEstimator est = MomentEstimator::exact();

    DescentState at = DescentState::from_params(ScaledGaussianParams(t.gamma, t.n, 1.0));
    mass_step(0.1, 1.0, at, pot, est);
    CHECK(at.kappa == doctest::Approx(1.0).epsilon(1e-14));

    DescentState off = DescentState::from_params(
        ScaledGaussianParams(rng.random_spd(2), rng.normal_vector(2), 1.4));
    double before = off.kappa;
    mass_step(0.1, 0.0, off, pot, est);
    CHECK(off.kappa == before);

    // discrete mass track converges to the explicit curve as tau -> 0
    ScaledGaussianParams p0(rng.random_spd(2), rng.normal_vector(2), 1.3);
    FlowConfig fc;
    fc.alpha = 0.0;
    fc.beta = 0.8;
    fc.dt = 1e-3;
    fc.t_end = 1.0;
    Trajectory flow_traj = integrate_gaussian(p0, fc, t);
    auto kap_exact = explicit_kappa(flow_traj, fc.beta, t);

    std::vector<double> errs;
    for (double tau : {1e-2, 5e-3}) {
        DescentConfig cfg;
        cfg.alpha = 0.0;
        cfg.beta = 0.8;
        cfg.tau = tau;
        cfg.n_steps = static_cast<int>(std::llround(1.0 / tau));
        cfg.track_mass = true;
        cfg.estimator_mode = MomentEstimator::Mode::exact_gaussian;
        DescentResult res = run_descent(cfg, p0, pot);
        errs.push_back(std::abs(res.steps.back().kappa - kap_exact.back()));
    }
    CHECK(errs[1] < 0.7 * errs[0]);
}

TEST_CASE("estimate_moments: constant Hessian exact from one sample; MC within 3 SE") {
    PotentialTarget pot = constant_hessian_potential(2, 2.5);
    MomentEstimator one = MomentEstimator::monte_carlo(1, 11);
    Moments m1 = one.estimate(ScaledGaussianParams::standard(2), pot);
    CHECK((m1.hess - 2.5 * MatrixXd::Identity(2, 2)).norm() == 0.0);

    Rng rng(103);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    PotentialTarget gpot = PotentialTarget::from_gaussian(t);
    ScaledGaussianParams p(rng.random_spd(2), rng.normal_vector(2), 1.0);
    Moments exact = MomentEstimator::exact().estimate(p, gpot);
    const int n_mc = 10000;
    MomentEstimator mc = MomentEstimator::monte_carlo(n_mc, 4321);
    Moments est = mc.estimate(p, gpot);
    // per-coordinate MC standard error of the gradient estimate
    MomentEstimator se_probe = MomentEstimator::monte_carlo(n_mc, 4321);
    VectorXd se = se_probe.gradient_standard_error(p, gpot);
    for (int j = 0; j < 2; ++j)
        CHECK(std::abs(est.grad(j) - exact.grad(j)) <= 3.0 * se(j));
}

TEST_CASE("estimate_moments: Gauss-Hermite integrates a quartic exactly enough") {
    // V(x) = x^4 under G(sigma, m): dense-grid quadrature as the oracle
    PotentialTarget quartic;
    quartic.kind = PotentialTarget::Kind::custom;
    quartic.dim = 1;
    quartic.value = [](const VectorXd& x) { return std::pow(x(0), 4); };
    quartic.grad = [](const VectorXd& x) { return VectorXd(4.0 * std::pow(x(0), 3) * VectorXd::Ones(1)); };
    quartic.hess = [](const VectorXd& x) {
        return MatrixXd(12.0 * x(0) * x(0) * MatrixXd::Ones(1, 1));
    };
    ScaledGaussianParams p(0.7 * MatrixXd::Identity(1, 1), 0.4 * VectorXd::Ones(1), 1.0);
    MomentEstimator gh = MomentEstimator::gauss_hermite(10);
    Moments got = gh.estimate(p, quartic);

    const int n = 20000;
    const double lo = -14.0, hi = 14.0, h = (hi - lo) / n;
    double ev = 0.0, eg = 0.0, eh = 0.0;
    for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        VectorXd x(1);
        x << lo + i * h;
        double dens = density_at(p, x);
        ev += w * dens * quartic.value(x);
        eg += w * dens * quartic.grad(x)(0);
        eh += w * dens * quartic.hess(x)(0, 0);
    }
    ev *= h / 3.0;
    eg *= h / 3.0;
    eh *= h / 3.0;
    CHECK(got.value == doctest::Approx(ev).epsilon(1e-8));
    CHECK(got.grad(0) == doctest::Approx(eg).epsilon(1e-8));
    CHECK(got.hess(0, 0) == doctest::Approx(eh).epsilon(1e-8));

    PotentialTarget pot5 = constant_hessian_potential(5, 1.0);
    MomentEstimator gh5 = MomentEstimator::gauss_hermite(4);
    CHECK_THROWS_AS(gh5.estimate(ScaledGaussianParams::standard(5), pot5), ConfigError);
}

TEST_CASE("run_descent: convergence and one-step Euler consistency") {
    Rng rng(104);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    PotentialTarget pot = PotentialTarget::from_gaussian(t);
    ScaledGaussianParams p0(rng.random_spd(2), t.n + rng.normal_vector(2), 1.0);

    DescentConfig cfg;
    cfg.alpha = 1.0;
    cfg.beta = 1.0;
    cfg.tau = 1e-3;
    cfg.n_steps = 8000;
    cfg.estimator_mode = MomentEstimator::Mode::exact_gaussian;
    DescentResult res = run_descent(cfg, p0, pot);
    CHECK(res.steps.back().kl_estimate < 1e-4);
    CHECK(res.steps.back().kl_estimate < res.steps.front().kl_estimate);

    // single iteration equals one explicit-Euler step up to O(tau^2)
    for (double tau : {1e-2, 5e-3, 2.5e-3}) {
        DescentConfig c1 = cfg;
        c1.tau = tau;
        c1.n_steps = 1;
        DescentResult one = run_descent(c1, p0, pot);
        TangentHK v = rhs_gaussian_target(1.0, 1.0, p0, t);
        double err = (one.steps.back().sigma - (p0.sigma + tau * v.d_sigma)).norm() +
                     (one.steps.back().m - (p0.m + tau * v.d_m)).norm();
        CHECK(err < 10.0 * tau * tau);
    }
}

TEST_CASE("run_descent: seeded determinism is bitwise") {
    LogisticData data = accept::synthetic_logistic_data(50, 2, 7, 0.5);
    PotentialTarget pot = logistic_potential(data, 1.0);
    DescentConfig cfg;
    cfg.alpha = 1.0;
    cfg.beta = 1.0;
    cfg.tau = 0.05;
    cfg.n_steps = 200;
    cfg.n_mc = 20;
    cfg.seed = 321;
    DescentResult r1 = run_descent(cfg, ScaledGaussianParams::standard(2), pot);
    DescentResult r2 = run_descent(cfg, ScaledGaussianParams::standard(2), pot);
    REQUIRE(r1.steps.size() == r2.steps.size());
    for (std::size_t k = 0; k < r1.steps.size(); ++k) {
        CHECK(r1.steps[k].kl_estimate == r2.steps[k].kl_estimate);
        CHECK((r1.steps[k].m - r2.steps[k].m).norm() == 0.0);
        CHECK((r1.steps[k].sigma - r2.steps[k].sigma).norm() == 0.0);
    }
}

TEST_CASE("run_descent: the mass track does not couple back into the shape") {
    Rng rng(105);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    PotentialTarget pot = PotentialTarget::from_gaussian(t);
    ScaledGaussianParams p0(rng.random_spd(2), rng.normal_vector(2), 1.5);
    DescentConfig cfg;
    cfg.alpha = 0.8;
    cfg.beta = 0.9;
    cfg.tau = 5e-3;
    cfg.n_steps = 300;
    cfg.estimator_mode = MomentEstimator::Mode::exact_gaussian;
    cfg.track_mass = false;
    DescentResult without = run_descent(cfg, p0, pot);
    cfg.track_mass = true;
    DescentResult with = run_descent(cfg, p0, pot);
    for (std::size_t k = 0; k < with.steps.size(); ++k) {
        CHECK((with.steps[k].sigma - without.steps[k].sigma).norm() == 0.0);
        CHECK((with.steps[k].m - without.steps[k].m).norm() == 0.0);
    }
    CHECK(with.steps.back().kappa != doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("run_descent keeps every iterate SPD and counts conversions") {
    Rng rng(106);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    PotentialTarget pot = PotentialTarget::from_gaussian(t);
    DescentConfig cfg;
    cfg.alpha = 1.0;
    cfg.beta = 1.0;
    cfg.tau = 0.01;
    cfg.n_steps = 200;
    cfg.estimator_mode = MomentEstimator::Mode::exact_gaussian;
    DescentResult res = run_descent(cfg, ScaledGaussianParams(4.0 * MatrixXd::Identity(2, 2),
                                                              4.0 * VectorXd::Ones(2), 1.0),
                                    pot);
    for (const auto& rec : res.steps) CHECK(min_eigenvalue_sym(rec.sigma) > 0.0);
    CHECK(res.conversions > 0);
}

TEST_CASE("logistic potential: values, derivatives, convexity, validation") {
    LogisticData data = accept::synthetic_logistic_data(40, 2, 17, 0.25);
    PotentialTarget pot = logistic_potential(data);

    // theta = 0: every per-sample loss is log 2
    CHECK(pot.value(VectorXd::Zero(2)) ==
          doctest::Approx(std::log(2.0) / data.reg_lambda).epsilon(1e-12));

    Rng rng(107);
    const double h = 1e-6;
    for (int rep = 0; rep < 10; ++rep) {
        VectorXd theta = rng.normal_vector(2);
        VectorXd g = pot.grad(theta);
        MatrixXd H = pot.hess(theta);
        for (int j = 0; j < 2; ++j) {
            VectorXd e = VectorXd::Unit(2, j);
            double fd = (pot.value(theta + h * e) - pot.value(theta - h * e)) / (2.0 * h);
            CHECK(g(j) == doctest::Approx(fd).epsilon(1e-6));
            VectorXd gfd = (pot.grad(theta + h * e) - pot.grad(theta - h * e)) / (2.0 * h);
            CHECK((H.col(j) - gfd).norm() < 1e-5 * (1.0 + H.norm()));
        }
    }
    for (int rep = 0; rep < 1000; ++rep) {
        VectorXd theta = 3.0 * rng.normal_vector(2);
        CHECK(min_eigenvalue_sym(pot.hess(theta)) >= -1e-12);
    }
    CHECK_FALSE(pot.lambda_convexity.has_value());
    CHECK(logistic_potential(data, 0.7).lambda_convexity.value() == 0.7);

    LogisticData bad = data;
    bad.labels = Eigen::VectorXi::Ones(bad.labels.size() - 1);
    CHECK_THROWS_AS(logistic_potential(bad), DomainError);
    LogisticData bad2 = data;
    bad2.labels(0) = 2;
    CHECK_THROWS_AS(logistic_potential(bad2), DomainError);

    LogisticData with_icpt = data;
    with_icpt.include_intercept = true;
    PotentialTarget pot3 = logistic_potential(with_icpt);
    CHECK(pot3.dim == 3);
    CHECK(std::isfinite(pot3.value(VectorXd::Ones(3))));
}

TEST_CASE("overflow-safe logistic evaluation at extreme scores") {
    CHECK(std::isfinite(log1p_exp(800.0)));
    CHECK(log1p_exp(800.0) == doctest::Approx(800.0).epsilon(1e-12));
    CHECK(log1p_exp(-800.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sigmoid(800.0) == 1.0);
    CHECK(sigmoid(-800.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("newton_minimize finds quadratic minimizers exactly") {
    Rng rng(108);
    GaussianTarget t(rng.random_spd(3), rng.normal_vector(3), 1.0);
    PotentialTarget pot = PotentialTarget::from_gaussian(t);
    VectorXd min = newton_minimize(pot, VectorXd::Zero(3));
    CHECK((min - t.n).norm() < 1e-10);
}

TEST_SUITE_END();
