#include "hkgf/geometry.hpp"

#include <cmath>

#include "hkgf/errors.hpp"
#include "hkgf/gauss.hpp"
#include "hkgf/onsager.hpp"
#include "hkgf/rng.hpp"

namespace hkgf {

double hessian_form(double alpha, double beta, const MatrixXd& sigma, const VectorXd& m,
                    const GaussianTarget& target, const CotangentHK& eta) {
    const MatrixXd& gi = target.gamma_inv;
    const MatrixXd& S = eta.S;
    const VectorXd& mu = eta.mu;
    VectorXd w = m - target.n;
    const int d = static_cast<int>(m.size());

    MatrixXd SS = S * S;
    MatrixXd Ssig = S * sigma;           // S Sigma
    MatrixXd sigS = Ssig.transpose();    // Sigma S

    double h_otto = 4.0 * (S * gi * Ssig).trace() + 4.0 * S.squaredNorm() + mu.dot(gi * mu);

    // Mixed block re-derived from the Hessian formula (the printed version
    // fails the geodesic oracle; see tests).
    double h_mix = 4.0 * (Ssig * S * gi * sigma).trace() +
                   2.0 * (SS * sigma * gi * sigma).trace() +
                   2.0 * (SS * sigma).trace() +
                   2.0 * mu.dot((Ssig + sigS) * (gi * w)) +
                   mu.dot((sigma * gi + MatrixXd::Identity(d, d)) * mu);

    double h_she = 2.0 * (Ssig * Ssig * gi * sigma).trace() +
                   2.0 * mu.dot(sigma * S * sigma * gi * w) +
                   0.5 * mu.dot((sigma * gi * sigma + sigma) * mu);

    return alpha * alpha * h_otto + alpha * beta * h_mix + beta * beta * h_she;
}

double hessian_polarization(double alpha, double beta, const MatrixXd& sigma, const VectorXd& m,
                            const GaussianTarget& target, const CotangentHK& eta1,
                            const CotangentHK& eta2) {
    CotangentHK sum(symmetrize(eta1.S + eta2.S), eta1.mu + eta2.mu, eta1.k + eta2.k);
    CotangentHK diff(symmetrize(eta1.S - eta2.S), eta1.mu - eta2.mu, eta1.k - eta2.k);
    return 0.25 * (hessian_form(alpha, beta, sigma, m, target, sum) -
                   hessian_form(alpha, beta, sigma, m, target, diff));
}

GeodesicDerivative geodesic_rhs(double alpha, double beta, const GeodesicState& st,
                                GeodesicMode mode) {
    const MatrixXd& sigma = st.point.sigma;
    const MatrixXd& S = st.costate.S;
    const VectorXd& mu = st.costate.mu;
    const double kappa = st.point.kappa;
    const double k = st.costate.k;

    GeodesicDerivative d{TangentHK::zero(st.point.dim()), MatrixXd(), VectorXd(), 0.0};
    MatrixXd Ssig = S * sigma;

    d.point.d_sigma = symmetrize((2.0 * alpha / kappa) * (Ssig.transpose() + Ssig) +
                                 (2.0 * beta / kappa) * (sigma * Ssig));
    d.point.d_m = (alpha / kappa) * mu + (beta / kappa) * (sigma * mu);
    d.dS = symmetrize(-(2.0 * alpha / kappa) * (S * S) - (2.0 * beta / kappa) * (S * sigma * S) -
                      (0.5 * beta / kappa) * (mu * mu.transpose()));
    d.dmu = VectorXd::Zero(mu.size());

    if (mode == GeodesicMode::scaled) {
        d.point.d_kappa = beta * kappa * k;
        double q = 2.0 * alpha * (S * Ssig).trace() + 0.5 * alpha * mu.squaredNorm() +
                   beta * Ssig.squaredNorm() + 0.5 * beta * mu.dot(sigma * mu);
        d.dk = q / (kappa * kappa) - 0.5 * beta * k * k;
    } else {
        d.point.d_kappa = 0.0;
        d.dk = 0.0;
    }
    return d;
}

double geodesic_hamiltonian(double alpha, double beta, const GeodesicState& st,
                            GeodesicMode mode) {
    if (mode == GeodesicMode::scaled)
        return 0.5 * quadratic_form(alpha, beta, st.point, st.costate);
    return 0.5 * quadratic_form_normalized(alpha, beta, st.point.sigma, st.costate);
}

namespace {

struct RawGeo {
    MatrixXd sigma;
    VectorXd m;
    double kappa;
    MatrixXd S;
    VectorXd mu;
    double k;
};

RawGeo advance(const RawGeo& s, const GeodesicDerivative& d, double h) {
    return RawGeo{symmetrize(s.sigma + h * d.point.d_sigma),
                  s.m + h * d.point.d_m,
                  s.kappa + h * d.point.d_kappa,
                  symmetrize(s.S + h * d.dS),
                  s.mu + h * d.dmu,
                  s.k + h * d.dk};
}

GeodesicDerivative eval(double alpha, double beta, const RawGeo& s, GeodesicMode mode) {
    GeodesicState st{ScaledGaussianParams(s.sigma, s.m, s.kappa), CotangentHK(s.S, s.mu, s.k)};
    return geodesic_rhs(alpha, beta, st, mode);
}

} // namespace

GeodesicState geodesic_integrate(double alpha, double beta, GeodesicState st, double s_end,
                                 double ds, GeodesicMode mode) {
    if (!(ds != 0.0) || s_end * ds < 0.0)
        throw ConfigError("geodesic_integrate: ds must be nonzero with the sign of s_end");
    RawGeo s{st.point.sigma, st.point.m, st.point.kappa, st.costate.S, st.costate.mu,
             st.costate.k};
    long n = std::lround(s_end / ds);
    double h = (n > 0) ? s_end / n : 0.0;
    for (long i = 0; i < n; ++i) {
        GeodesicDerivative k1 = eval(alpha, beta, s, mode);
        GeodesicDerivative k2 = eval(alpha, beta, advance(s, k1, 0.5 * h), mode);
        GeodesicDerivative k3 = eval(alpha, beta, advance(s, k2, 0.5 * h), mode);
        GeodesicDerivative k4 = eval(alpha, beta, advance(s, k3, h), mode);
        s.sigma = symmetrize(s.sigma + h / 6.0 * (k1.point.d_sigma + 2.0 * k2.point.d_sigma +
                                                  2.0 * k3.point.d_sigma + k4.point.d_sigma));
        s.m += h / 6.0 * (k1.point.d_m + 2.0 * k2.point.d_m + 2.0 * k3.point.d_m + k4.point.d_m);
        s.kappa += h / 6.0 * (k1.point.d_kappa + 2.0 * k2.point.d_kappa + 2.0 * k3.point.d_kappa +
                              k4.point.d_kappa);
        s.S = symmetrize(s.S + h / 6.0 * (k1.dS + 2.0 * k2.dS + 2.0 * k3.dS + k4.dS));
        s.mu += h / 6.0 * (k1.dmu + 2.0 * k2.dmu + 2.0 * k3.dmu + k4.dmu);
        s.k += h / 6.0 * (k1.dk + 2.0 * k2.dk + 2.0 * k3.dk + k4.dk);
    }
    return GeodesicState{ScaledGaussianParams(s.sigma, s.m, s.kappa),
                         CotangentHK(s.S, s.mu, s.k)};
}

ScanReport convexity_scan(double alpha, double beta, const GaussianTarget& target,
                          const ScanConfig& cfg) {
    if (cfg.n_samples < 1) throw ConfigError("convexity_scan: n_samples must be >= 1");
    const int d = target.dim();
    ScanReport rep;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.n_samples = cfg.n_samples;
    rep.seed = cfg.seed;

    std::vector<double> quotients;
    quotients.reserve(cfg.n_samples);
    double best = std::numeric_limits<double>::infinity();

    for (int i = 0; i < cfg.n_samples; ++i) {
        Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(i));
        MatrixXd sigma = rng.random_spd(d, cfg.sigma_log_range);
        VectorXd m = target.n + cfg.mean_radius * rng.normal_vector(d);
        MatrixXd S = rng.random_symmetric(d);
        VectorXd mu = rng.normal_vector(d);
        // unit-norm eta excludes the degenerate quotient
        double norm = std::sqrt(S.squaredNorm() + mu.squaredNorm());
        if (norm < 1e-12) continue;
        CotangentHK eta(S / norm, mu / norm, 0.0);
        double denom = quadratic_form_normalized(alpha, beta, sigma, eta);
        double q = hessian_form(alpha, beta, sigma, m, target, eta) / denom;
        quotients.push_back(q);
        if (q < best) {
            best = q;
            rep.witness.sigma = sigma;
            rep.witness.m = m;
            rep.witness.eta = eta;
            rep.witness.quotient = q;
        }
    }
    rep.min_quotient = best;
    std::sort(quotients.begin(), quotients.end());
    for (int q10 = 0; q10 <= 10; ++q10) {
        std::size_t idx = std::min(quotients.size() - 1,
                                   static_cast<std::size_t>(q10 * (quotients.size() - 1) / 10));
        rep.deciles.push_back(quotients[idx]);
    }
    return rep;
}

std::vector<double> mean_escape_quotients(double alpha, double beta,
                                          const GaussianTarget& target,
                                          const std::vector<double>& radii) {
    const int d = target.dim();
    MatrixXd sigma = MatrixXd::Identity(d, d);
    MatrixXd S = MatrixXd::Identity(d, d);
    VectorXd u = VectorXd::Zero(d);
    u(0) = 1.0;
    std::vector<double> out;
    out.reserve(radii.size());
    for (double r : radii) {
        VectorXd m = target.n + r * u;
        VectorXd mu = -u;
        double norm = std::sqrt(S.squaredNorm() + mu.squaredNorm());
        CotangentHK eta(S / norm, mu / norm, 0.0);
        double denom = quadratic_form_normalized(alpha, beta, sigma, eta);
        out.push_back(hessian_form(alpha, beta, sigma, m, target, eta) / denom);
    }
    return out;
}

SublevelBound sublevel_radius(double E, const GaussianTarget& target) {
    if (!(E > 0.0)) throw DomainError("sublevel_radius: E must be positive");
    SublevelBound b;
    b.E = E;
    b.r1 = std::sqrt(2.0 * max_eigenvalue_sym(target.gamma) * E);
    b.r2 = spectral_norm_sym(target.gamma) * (1.0 + std::log(4.0) + 4.0 * E);
    b.r3 = spectral_norm_sym(target.gamma_inv) * std::exp(1.0 + 2.0 * E);
    b.r_E = std::max({b.r1, b.r2, b.r3});
    return b;
}

} // namespace hkgf
