#include <doctest.h>

#include <cmath>

#include "hkgf/decay.hpp"
#include "hkgf/errors.hpp"
#include "hkgf/flow.hpp"
#include "hkgf/gauss.hpp"
#include "hkgf/onsager.hpp"
#include "hkgf/rng.hpp"

using namespace hkgf;

TEST_SUITE_BEGIN("decay");

TEST_CASE("dissipation split: target point, direct value, Onsager pairing") {
    Rng rng(81);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    DissipationSplit at = dissipation_split(1.0, 1.0, t.gamma, t.n, t);
    CHECK(at.d_cov == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(at.d_mean == doctest::Approx(0.0).epsilon(1e-13));

    GaussianTarget t1 = GaussianTarget::standard(1);
    DissipationSplit d1 =
        dissipation_split(1.0, 0.0, 2.0 * MatrixXd::Identity(1, 1), VectorXd::Zero(1), t1);
    CHECK(d1.d_cov == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d1.d_mean == 0.0);

    for (int i = 0; i < 100; ++i) {
        int d = 1 + static_cast<int>(rng.raw() % 3);
        GaussianTarget tr(rng.random_spd(d), rng.normal_vector(d), 1.0);
        MatrixXd sigma = rng.random_spd(d);
        VectorXd m = rng.normal_vector(d);
        double a = rng.uniform(0.0, 2.0), b = rng.uniform(0.0, 2.0);
        if (a + b == 0.0) a = 1.0;
        DissipationSplit ds = dissipation_split(a, b, sigma, m, tr);
        CHECK(ds.d_cov >= 0.0);
        CHECK(ds.d_mean >= 0.0);
        // <DE, K DE> with the mass block dropped (normalized system)
        ScaledGaussianParams p(sigma, m, 1.0);
        CotangentHK de = entropy_differential(p, tr);
        CotangentHK de_shape(de.S, de.mu, 0.0);
        CHECK(ds.total() ==
              doctest::Approx(quadratic_form(a, b, p, de_shape)).epsilon(1e-12));
    }
}

TEST_CASE("auxiliary function H and its endpoint limits") {
    Rng rng(82);
    for (int i = 0; i < 20; ++i) {
        double delta = rng.uniform(0.0, 3.0), beta = rng.uniform(0.0, 3.0);
        CHECK(H_aux(delta, beta, 1.0) == doctest::Approx(2.0 * (delta + beta)).epsilon(1e-12));
    }
    Interval full{0.0, std::numeric_limits<double>::infinity()};
    CHECK(h_inf(1.0, 0.0, full) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h_inf(0.0, 1.0, full) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(h_inf(1.0, 1.0, Interval{2.0, 1.0}), DomainError);
}

TEST_CASE("h_inf agrees with brute-force grid minimization") {
    Rng rng(83);
    for (int i = 0; i < 20; ++i) {
        double delta = rng.uniform(0.05, 2.0), beta = rng.uniform(0.05, 2.0);
        double lo = std::exp(rng.uniform(-4.0, -0.1));
        double hi = std::exp(rng.uniform(0.1, 4.0));
        if (i % 4 == 0) delta = 0.0;
        if (i % 4 == 1) beta = 0.0;
        if (delta == 0.0 && beta == 0.0) delta = 1.0;
        Interval J{lo, hi};
        double val = h_inf(delta, beta, J);
        double brute = std::numeric_limits<double>::infinity();
        const int n = 200000;
        for (int k = 0; k <= n; ++k) {
            double y = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / n);
            brute = std::min(brute, H_aux(delta, beta, y));
        }
        CHECK(val == doctest::Approx(brute).epsilon(1e-6));
        CHECK(val <= brute + 1e-12);
    }
}

TEST_CASE("monotone factors and the phi <= zeta_phi comparison") {
    double prev_dec = std::numeric_limits<double>::infinity();
    double prev_inc = 0.0;
    for (int k = 0; k <= 600; ++k) {
        double y = std::exp(-7.0 + 14.0 * k / 600.0);   // (1e-3, 1e3)
        double dec = h_ratio_cov(y);
        double inc = h_ratio_mass(y);
        CHECK(dec <= prev_dec + 1e-12);
        CHECK(inc >= prev_inc - 1e-12);
        CHECK(phi_entropy(y) <= zeta_phi(y) + 1e-12);
        prev_dec = dec;
        prev_inc = inc;
    }
}

TEST_CASE("PL constants: three-case global formula and the paper bracket") {
    Rng rng(84);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    double nu_min = min_eigenvalue_sym(t.gamma_inv);

    PlConstants otto = pl_constants(1.3, 0.0, t);
    CHECK(otto.c_cov == doctest::Approx(2.0 * 1.3 * nu_min).epsilon(1e-13));
    CHECK(otto.c_mean == doctest::Approx(2.0 * 1.3 * nu_min).epsilon(1e-13));

    PlConstants hell = pl_constants(0.0, 1.7, t);
    CHECK(hell.c_cov == 0.0);
    CHECK(hell.c_mean == 0.0);

    for (int i = 0; i < 100; ++i) {
        GaussianTarget tr(rng.random_spd(2), rng.normal_vector(2), 1.0);
        double a = rng.uniform(0.05, 2.0), b = rng.uniform(0.05, 2.0);
        double ag = a * min_eigenvalue_sym(tr.gamma_inv);
        PlConstants pc = pl_constants(a, b, tr);
        CHECK(pc.c_cov >= 2.0 * ag - 1e-10);
        CHECK(pc.c_cov < 4.0 * ag + 2.0 * b);
        CHECK(pc.c_mean == doctest::Approx(2.0 * ag).epsilon(1e-13));
    }
}

TEST_CASE("PL constants on sublevels") {
    Rng rng(85);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    double a = 0.9, b = 1.4, E = 2.0;
    double ag = a * min_eigenvalue_sym(t.gamma_inv);
    PlConstants pc = pl_constants(a, b, t, E);
    double j_lo = std::exp(-(1.0 + 2.0 * E));
    double j_hi = 1.0 + std::log(4.0) + 4.0 * E;
    CHECK(pc.c_cov ==
          doctest::Approx(2.0 * ag * h_ratio_cov(j_hi) + b * h_ratio_mass(j_lo)).epsilon(1e-13));
    CHECK(pc.c_mean == doctest::Approx(2.0 * ag + 2.0 * b * j_lo).epsilon(1e-13));
    CHECK(pc.c_cov > 0.0);
    CHECK_THROWS_AS(pl_constants(a, b, t, -1.0), DomainError);

    // pointwise PL inequality on the sublevel
    int accepted = 0;
    while (accepted < 2000) {
        MatrixXd sigma = rng.random_spd(2, 1.2);
        VectorXd m = t.n + 1.5 * rng.normal_vector(2);
        EnergySplit es = entropy_split(sigma, m, t);
        if (es.normalized_total() > E) continue;
        ++accepted;
        DissipationSplit ds = dissipation_split(a, b, sigma, m, t);
        CHECK(ds.d_cov >= pc.c_cov * es.h_cov - 1e-12 * (1.0 + ds.d_cov));
        CHECK(ds.d_mean >= pc.c_mean * es.h_mean - 1e-12 * (1.0 + ds.d_mean));
    }
}

TEST_CASE("refined rates: values and prefactor conventions") {
    GaussianTarget t(VectorXd{{1.0, 4.0}}.asDiagonal(), VectorXd::Zero(2), 1.0);
    DecayRates r = refined_rates(1.0, 0.5, t, 0.7);
    CHECK(r.nu_cov == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.nu_mean == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(r.prefactor_cov >= 1.0);
    CHECK(r.prefactor_mean >= 1.0);

    DecayRates wide = refined_rates(1.0, 0.5, t, 1.4);
    CHECK(wide.prefactor_cov == 1.0);
    CHECK(wide.prefactor_mean == 1.0);

    Rng rng(86);
    GaussianTarget tr(rng.random_spd(3), rng.normal_vector(3), 1.0);
    DecayRates hell = refined_rates(0.0, 0.9, tr, 0.5);
    CHECK(hell.nu_cov == doctest::Approx(0.9).epsilon(1e-14));

    CHECK_THROWS_AS(refined_rates(1.0, 1.0, t, 0.0), DomainError);
}

TEST_CASE("verify_decay: vacuous at equilibrium, sharp on the identity target") {
    GaussianTarget t = GaussianTarget::standard(2);
    FlowConfig fc;
    fc.alpha = 1.0;
    fc.beta = 1.0;
    fc.dt = 1e-3;
    fc.t_end = 1.0;
    Trajectory still = integrate_normalized(ScaledGaussianParams(t.gamma, t.n, 1.0), fc, t);
    DecayRates rates = refined_rates(1.0, 1.0, t, 1.0);
    DecayReport vac = verify_decay(still, rates, DecayMode::refined);
    CHECK(vac.vacuous);
    CHECK(vac.passed);

    Rng rng(87);
    MatrixXd sigma0 = rng.random_spd(2, 0.8);
    VectorXd m0 = rng.normal_vector(2);
    ScaledGaussianParams p0(sigma0, m0, 1.0);
    fc.t_end = 4.0;
    Trajectory traj = integrate_normalized(p0, fc, t);
    double b_min0 = t.normalized_spectrum(sigma0).minCoeff();
    DecayRates r = refined_rates(1.0, 1.0, t, b_min0);
    DecayReport rep = verify_decay(traj, r, DecayMode::refined);
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.passed);
    // Gamma = I: every mode decays at exactly nu_cov = 3
    CHECK(rep.fitted_rate_cov == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("verify_decay: PL modes bound the energy and the fitted energy rate") {
    Rng rng(88);
    GaussianTarget t(rng.random_spd(2, 0.5), rng.normal_vector(2), 1.0);
    MatrixXd sigma0 = rng.random_spd(2, 0.7);
    VectorXd m0 = t.n + rng.normal_vector(2);
    ScaledGaussianParams p0(sigma0, m0, 1.0);
    FlowConfig fc;
    fc.alpha = 1.0;
    fc.beta = 0.8;
    fc.dt = 1e-3;
    fc.t_end = 4.0;
    Trajectory traj = integrate_normalized(p0, fc, t);

    double e0 = traj.energy.front().normalized_total();
    DecayRates rates = refined_rates(fc.alpha, fc.beta, t,
                                     t.normalized_spectrum(sigma0).minCoeff());
    {
        DecayReport rep = verify_decay(traj, rates, DecayMode::pl_global);
        CHECK(rep.passed);
    }
    {
        PlConstants sub = pl_constants(fc.alpha, fc.beta, t, e0);
        DecayRates r2 = rates;
        r2.c_pl_cov = sub.c_cov;
        r2.c_pl_mean = sub.c_mean;
        DecayReport rep = verify_decay(traj, r2, DecayMode::pl_sublevel);
        CHECK(rep.passed);
        CHECK(sub.c_cov <= rep.fitted_rate_energy + 1e-9);
    }
}

TEST_CASE("verify_decay: tampered rates are caught (sentinel)") {
    // identity target: the true covariance energy decays at exactly
    // 2 nu_cov asymptotically, so a 3x-inflated rate must violate the bound
    Rng rng(89);
    GaussianTarget t = GaussianTarget::standard(2);
    ScaledGaussianParams p0(rng.random_spd(2, 0.8), rng.normal_vector(2), 1.0);
    FlowConfig fc;
    fc.alpha = 0.7;
    fc.beta = 0.9;
    fc.dt = 1e-3;
    fc.t_end = 4.0;
    Trajectory traj = integrate_normalized(p0, fc, t);
    DecayRates rates = refined_rates(fc.alpha, fc.beta, t,
                                     t.normalized_spectrum(p0.sigma).minCoeff());
    CHECK(verify_decay(traj, rates, DecayMode::refined).passed);
    DecayRates tampered = rates;
    tampered.nu_cov *= 3.0;
    DecayReport rep = verify_decay(traj, tampered, DecayMode::refined);
    CHECK_FALSE(rep.passed);
    CHECK(rep.max_violation > 0.0);
}

TEST_CASE("verify_decay: log-lambda mode for a Gaussian (hence log-concave) target") {
    Rng rng(90);
    GaussianTarget t(rng.random_spd(2, 0.4), rng.normal_vector(2), 1.0);
    ScaledGaussianParams p0(rng.random_spd(2, 0.5), t.n + rng.normal_vector(2), 1.0);
    FlowConfig fc;
    fc.alpha = 1.0;
    fc.beta = 0.7;
    fc.dt = 1e-3;
    fc.t_end = 3.0;
    Trajectory traj = integrate_normalized(p0, fc, t);

    double lambda = min_eigenvalue_sym(t.gamma_inv);
    double sig_min_max = 0.0;
    for (const auto& p : traj.points)
        sig_min_max = std::max(sig_min_max, min_eigenvalue_sym(p.sigma));
    DecayRates rates = refined_rates(fc.alpha, fc.beta, t,
                                     t.normalized_spectrum(p0.sigma).minCoeff());
    rates.gamma_loglambda = lambda * (2.0 * fc.alpha + fc.beta / sig_min_max);
    DecayReport rep = verify_decay(traj, rates, DecayMode::log_lambda, 0.0);
    CHECK(rep.passed);

    DecayRates missing = rates;
    missing.gamma_loglambda.reset();
    CHECK_THROWS_AS(verify_decay(traj, missing, DecayMode::log_lambda), ConfigError);
}

TEST_CASE("stationarity residuals: exact at the target, growing with perturbation") {
    Rng rng(91);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    PotentialTarget pot = PotentialTarget::from_gaussian(t);
    MomentEstimator est = MomentEstimator::exact();
    ElResiduals at = sublevel_minimizer_check(pot, ScaledGaussianParams(t.gamma, t.n, 1.0), est);
    CHECK(at.precision_residual < 1e-12);
    CHECK(at.gradient_residual < 1e-12);

    double prev_p = 0.0, prev_g = 0.0;
    for (double eps : {0.1, 0.3, 0.9}) {
        MatrixXd sigma = symmetrize(t.gamma + eps * MatrixXd::Identity(2, 2));
        VectorXd m = t.n + eps * VectorXd::Ones(2);
        MomentEstimator e2 = MomentEstimator::exact();
        ElResiduals r = sublevel_minimizer_check(pot, ScaledGaussianParams(sigma, m, 1.0), e2);
        CHECK(r.precision_residual > prev_p);
        CHECK(r.gradient_residual > prev_g);
        prev_p = r.precision_residual;
        prev_g = r.gradient_residual;
    }
}

TEST_SUITE_END();
