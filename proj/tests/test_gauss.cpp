#include <doctest.h>

#include <cmath>

#include "hkgf/errors.hpp"
#include "hkgf/gauss.hpp"
#include "hkgf/rng.hpp"

using namespace hkgf;

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;

double phi_ref(double b) { return b - 1.0 - std::log(b); }
} // namespace

TEST_SUITE_BEGIN("gauss");

TEST_CASE("to_standard maps the unit simple point to the standard Gaussian") {
    for (int d : {1, 2, 3}) {
        SimpleCoords q(MatrixXd::Identity(d, d), VectorXd::Zero(d), -0.5 * d * kLog2Pi);
        ScaledGaussianParams p = to_standard(q);
        CHECK((p.sigma - MatrixXd::Identity(d, d)).norm() < 1e-14);
        CHECK(p.m.norm() < 1e-14);
        CHECK(p.kappa == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("to_standard inverts the precision") {
    SimpleCoords q(2.0 * MatrixXd::Identity(1, 1), VectorXd::Zero(1), 0.37);
    ScaledGaussianParams p = to_standard(q);
    CHECK(p.sigma(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.m(0) == 0.0);
}

TEST_CASE("coordinate transforms are inverse to each other") {
    for (int d : {1, 2, 3, 5, 10}) {
        for (int rep = 0; rep < 10; ++rep) {
            Rng rng(100 * d + rep);
            SimpleCoords q(rng.random_spd(d), rng.normal_vector(d), rng.uniform(-2.0, 2.0));
            SimpleCoords q2 = to_simple(to_standard(q));
            CHECK((q.A - q2.A).norm() / q.A.norm() < 1e-10);
            CHECK((q.b - q2.b).norm() < 1e-10 * (1.0 + q.b.norm()));
            CHECK(q.c == doctest::Approx(q2.c).epsilon(1e-10));

            ScaledGaussianParams p(rng.random_spd(d), rng.normal_vector(d),
                                   std::exp(rng.uniform(-1.0, 1.0)));
            ScaledGaussianParams p2 = to_standard(to_simple(p));
            CHECK((p.sigma - p2.sigma).norm() / p.sigma.norm() < 1e-10);
            CHECK((p.m - p2.m).norm() < 1e-10 * (1.0 + p.m.norm()));
            CHECK(p.kappa == doctest::Approx(p2.kappa).epsilon(1e-10));
        }
    }
}

TEST_CASE("non-SPD inputs are rejected with the offending eigenvalue") {
    MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;   // eigenvalues 3, -1
    CHECK_THROWS_AS(SimpleCoords(bad, VectorXd::Zero(2), 0.0), DomainError);
    try {
        ScaledGaussianParams p(bad, VectorXd::Zero(2), 1.0);
        (void)p;
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
    }
    MatrixXd asym(2, 2);
    asym << 1.0, 0.1, 0.0, 1.0;
    CHECK_THROWS_AS(ScaledGaussianParams(asym, VectorXd::Zero(2), 1.0), DomainError);
}

TEST_CASE("density values: standard normal and mode") {
    ScaledGaussianParams std1 = ScaledGaussianParams::standard(1);
    CHECK(density_at(std1, VectorXd::Zero(1)) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));

    Rng rng(5);
    ScaledGaussianParams p(rng.random_spd(2), rng.normal_vector(2), 1.7);
    double mode = p.kappa / std::sqrt(std::exp(log_det_spd(p.sigma)) *
                                      std::pow(2.0 * M_PI, 2));
    CHECK(density_at(p, p.m) == doctest::Approx(mode).epsilon(1e-12));
}

TEST_CASE("density integrates to the total mass (quadrature oracle)") {
    ScaledGaussianParams p(0.6 * MatrixXd::Identity(1, 1), 0.3 * VectorXd::Ones(1), 1.8);
    const int n = 4000;
    const double lo = -12.0, hi = 12.0, h = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        VectorXd x(1);
        x << lo + i * h;
        sum += w * density_at(p, x);
    }
    sum *= h / 3.0;
    CHECK(sum == doctest::Approx(p.kappa).epsilon(1e-6));
}

TEST_CASE("relative entropy: equality case and closed values") {
    Rng rng(7);
    GaussianTarget t(rng.random_spd(3), rng.normal_vector(3), 1.4);
    ScaledGaussianParams at_target(t.gamma, t.n, t.varkappa);
    CHECK(relative_entropy(at_target, t) == doctest::Approx(0.0).epsilon(1e-13));

    GaussianTarget t1 = GaussianTarget::standard(1);
    ScaledGaussianParams p1(2.0 * MatrixXd::Identity(1, 1), VectorXd::Zero(1), 1.0);
    CHECK(relative_entropy(p1, t1) == doctest::Approx(0.5 * (1.0 - std::log(2.0))).epsilon(1e-13));

    double vk = 0.9;
    GaussianTarget t2(t.gamma, t.n, vk);
    ScaledGaussianParams p2(t.gamma, t.n, 2.0 * vk);
    CHECK(relative_entropy(p2, t2) ==
          doctest::Approx(vk * (2.0 * std::log(2.0) - 1.0)).epsilon(1e-13));
}

TEST_CASE("relative entropy against numerical quadrature of the KL integrand") {
    GaussianTarget t(1.3 * MatrixXd::Identity(1, 1), 0.4 * VectorXd::Ones(1), 1.0);
    ScaledGaussianParams p(0.8 * MatrixXd::Identity(1, 1), -0.2 * VectorXd::Ones(1), 1.0);
    ScaledGaussianParams pi_meas(t.gamma, t.n, t.varkappa);
    const int n = 6000;
    const double lo = -14.0, hi = 14.0, h = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        VectorXd x(1);
        x << lo + i * h;
        double rho = density_at(p, x), pi = density_at(pi_meas, x);
        sum += w * lambda_boltzmann(rho / pi) * pi;
    }
    sum *= h / 3.0;
    CHECK(relative_entropy(p, t) == doctest::Approx(sum).epsilon(1e-8));
}

TEST_CASE("relative entropy is nonnegative, zero only at the target") {
    Rng rng(11);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    for (int i = 0; i < 1000; ++i) {
        ScaledGaussianParams p(rng.random_spd(2), rng.normal_vector(2),
                               std::exp(rng.uniform(-1.5, 1.5)));
        double e = relative_entropy(p, t);
        CHECK(e >= 0.0);
        double dist = (p.sigma - t.gamma).norm() + (p.m - t.n).norm() +
                      std::abs(p.kappa - t.varkappa);
        if (dist > 1e-2) CHECK(e > 1e-8);
    }
}

TEST_CASE("entropy split: vanishing parts and the eigenvalue formula") {
    GaussianTarget t = GaussianTarget::standard(2);
    Rng rng(13);
    MatrixXd sigma = rng.random_spd(2);
    EnergySplit cov_only = entropy_split(sigma, t.n, t);
    CHECK(cov_only.h_mean == doctest::Approx(0.0).epsilon(1e-14));
    EnergySplit mean_only = entropy_split(t.gamma, VectorXd::Ones(2), t);
    CHECK(mean_only.h_cov == doctest::Approx(0.0).epsilon(1e-13));

    MatrixXd diag = VectorXd{{2.0, 0.5}}.asDiagonal();
    EnergySplit s = entropy_split(diag, t.n, t);
    CHECK(s.h_cov == doctest::Approx(0.5 * (phi_ref(2.0) + phi_ref(0.5))).epsilon(1e-13));

    ScaledGaussianParams p(diag, VectorXd::Ones(2), 1.3);
    EnergySplit full = entropy_split(p, t);
    CHECK(p.kappa * full.normalized_total() + full.mass_term ==
          doctest::Approx(relative_entropy(p, t)).epsilon(1e-13));
}

TEST_CASE("entropy differential: critical point and direct value") {
    Rng rng(17);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.2);
    CotangentHK at_target = entropy_differential(ScaledGaussianParams(t.gamma, t.n, t.varkappa), t);
    CHECK(at_target.S.norm() < 1e-13);
    CHECK(at_target.mu.norm() < 1e-13);
    CHECK(std::abs(at_target.k) < 1e-13);

    GaussianTarget t1 = GaussianTarget::standard(1);
    ScaledGaussianParams p1(2.0 * MatrixXd::Identity(1, 1), VectorXd::Zero(1), 1.0);
    CHECK(entropy_differential(p1, t1).S(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("entropy differential matches finite differences of the energy") {
    Rng rng(19);
    const double h = 1e-5;
    for (int rep = 0; rep < 20; ++rep) {
        int d = 1 + static_cast<int>(rng.raw() % 3);
        GaussianTarget t(rng.random_spd(d), rng.normal_vector(d), std::exp(rng.uniform(-0.5, 0.5)));
        ScaledGaussianParams p(rng.random_spd(d), rng.normal_vector(d),
                               std::exp(rng.uniform(-0.5, 0.5)));
        CotangentHK de = entropy_differential(p, t);

        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                MatrixXd dir = MatrixXd::Zero(d, d);
                dir(i, j) = dir(j, i) = 1.0;
                double ep = relative_entropy(ScaledGaussianParams(p.sigma + h * dir, p.m, p.kappa), t);
                double em = relative_entropy(ScaledGaussianParams(p.sigma - h * dir, p.m, p.kappa), t);
                double fd = (ep - em) / (2.0 * h);
                double cl = (de.S.array() * dir.array()).sum();
                CHECK(cl == doctest::Approx(fd).epsilon(1e-6));
            }
            VectorXd dm = VectorXd::Zero(d);
            dm(i) = 1.0;
            double ep = relative_entropy(ScaledGaussianParams(p.sigma, p.m + h * dm, p.kappa), t);
            double em = relative_entropy(ScaledGaussianParams(p.sigma, p.m - h * dm, p.kappa), t);
            CHECK(de.mu(i) == doctest::Approx((ep - em) / (2.0 * h)).epsilon(1e-6));
        }
        double ep = relative_entropy(ScaledGaussianParams(p.sigma, p.m, p.kappa + h), t);
        double em = relative_entropy(ScaledGaussianParams(p.sigma, p.m, p.kappa - h), t);
        CHECK(de.k == doctest::Approx((ep - em) / (2.0 * h)).epsilon(1e-6));
    }
}

TEST_CASE("H is jointly convex in (Sigma, m)") {
    Rng rng(23);
    GaussianTarget t(rng.random_spd(2), rng.normal_vector(2), 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        MatrixXd s0 = rng.random_spd(2), s1 = rng.random_spd(2);
        VectorXd m0 = rng.normal_vector(2), m1 = rng.normal_vector(2);
        double lam = rng.uniform(0.05, 0.95);
        double lhs = relative_entropy_normalized(lam * s0 + (1.0 - lam) * s1,
                                                 lam * m0 + (1.0 - lam) * m1, t);
        double rhs = lam * relative_entropy_normalized(s0, m0, t) +
                     (1.0 - lam) * relative_entropy_normalized(s1, m1, t);
        CHECK(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("lambda_B conventions") {
    CHECK(lambda_boltzmann(0.0) == 1.0);
    CHECK(lambda_boltzmann(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(lambda_boltzmann(1.0 + 1e-6) > 0.0);
    CHECK(lambda_boltzmann(1.0 - 1e-6) > 0.0);
    CHECK(lambda_boltzmann(2.0) == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-15));
}

TEST_CASE("moment identities: orthogonality, identity case, Monte Carlo") {
    CHECK(moment2(VectorXd::Unit(3, 0), VectorXd::Unit(3, 1)) == 0.0);
    for (int d : {1, 2, 4})
        CHECK(quartic_moment(MatrixXd::Identity(d, d), MatrixXd::Identity(d, d)) ==
              doctest::Approx(2.0 * d + double(d) * d).epsilon(1e-15));

    Rng rng(29);
    const int d = 3, n = 200000;
    MatrixXd A = rng.random_symmetric(d), B = rng.random_symmetric(d);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        VectorXd x = rng.normal_vector(d);
        double v = (x.dot(A * x)) * (x.dot(B * x));
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / n;
    double se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - quartic_moment(A, B)) <= 3.0 * se);
}

TEST_SUITE_END();
