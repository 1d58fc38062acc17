#include "hkgf/descent.hpp"

#include <cmath>

#include "hkgf/errors.hpp"
#include "hkgf/gauss.hpp"

namespace hkgf {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

void DescentConfig::validate() const {
    if (alpha < 0.0 || beta < 0.0 || (alpha == 0.0 && beta == 0.0))
        throw ConfigError("descent weights must satisfy alpha, beta >= 0 and alpha + beta > 0");
    if (!(tau > 0.0)) throw ConfigError("descent step size tau must be positive");
    if (!(tau * beta < 1.0))
        throw ConfigError("descent requires tau*beta < 1 (got " + std::to_string(tau * beta) +
                          "); the FR precision update must stay a convex combination");
    if (n_steps < 1) throw ConfigError("descent needs n_steps >= 1");
    if (n_mc < 1) throw ConfigError("descent needs n_mc >= 1");
}

DescentState DescentState::from_params(const ScaledGaussianParams& p) {
    DescentState st;
    st.sigma = p.sigma;
    st.precision = inverse_spd(p.sigma);
    st.m = p.m;
    st.kappa = p.kappa;
    st.sigma_current = true;
    return st;
}

const MatrixXd& DescentState::covariance() {
    if (!sigma_current) {
        sigma = inverse_spd(precision);
        sigma_current = true;
        ++conversions;
    }
    return sigma;
}

const MatrixXd& DescentState::prec() {
    if (sigma_current) {
        precision = inverse_spd(sigma);
        sigma_current = false;
        ++conversions;
    }
    return precision;
}

ScaledGaussianParams DescentState::params() {
    return ScaledGaussianParams(covariance(), m, kappa);
}

namespace {

void bw_step_with(double tau, double alpha, DescentState& st, const Moments& mom) {
    if (alpha == 0.0) return;
    const int d = static_cast<int>(st.m.size());
    MatrixXd M = MatrixXd::Identity(d, d) + tau * alpha * (st.prec() - symmetrize(mom.hess));
    if (!M.allFinite()) throw NumericalError("bw_step: non-finite moment estimate");
    M = symmetrize(M);
    if (!is_spd(M))
        throw NumericalError("bw_step: conjugation factor I + tau*alpha*(Sigma^{-1} - E[hess V]) "
                             "is not positive definite; reduce tau*alpha");
    const MatrixXd& cov = st.covariance();
    st.sigma = symmetrize(M * cov * M);
    st.sigma_current = true;
    st.m -= tau * alpha * mom.grad;
}

void fr_step_with(double tau, double beta, DescentState& st, const Moments& mom) {
    if (beta == 0.0) return;
    MatrixXd hess = symmetrize(mom.hess);
    MatrixXd prec_new = symmetrize((1.0 - tau * beta) * st.prec() + tau * beta * hess);
    if (!is_spd(prec_new))
        throw NumericalError("fr_step: updated precision is not positive definite "
                             "(indefinite Hessian estimate)");
    st.precision = prec_new;
    st.sigma_current = false;
    // the mean moves with the already-updated covariance
    st.m -= tau * beta * (st.covariance() * mom.grad);
}

void mass_step_with(double tau, double beta, DescentState& st, double h, double varkappa) {
    if (beta == 0.0) return;
    double drift = st.kappa * (std::log(st.kappa / varkappa) + h);
    double step = tau;
    double next = st.kappa - step * beta * drift;
    int halvings = 0;
    while (!(next > 0.0) && halvings < 60) {
        step *= 0.5;
        next = st.kappa - step * beta * drift;
        ++halvings;
    }
    if (!(next > 0.0)) throw NumericalError("mass_step: could not keep kappa positive");
    st.kappa = next;
}

/// H(G(Sigma_k, m_k) | pi/|pi|): closed form for Gaussian targets, sampled
/// estimate when the normalizer is known.
double shape_entropy(DescentState& st, const PotentialTarget& pot, const Moments& mom,
                     double* varkappa) {
    *varkappa = 1.0;
    if (pot.kind == PotentialTarget::Kind::gaussian_quadratic && pot.gaussian) {
        *varkappa = pot.gaussian->varkappa;
        return relative_entropy_normalized(st.covariance(), st.m, *pot.gaussian);
    }
    if (!pot.normalizer_known)
        throw ConfigError("mass step requires a Gaussian target or a known normalizer");
    const int d = static_cast<int>(st.m.size());
    return mom.value - 0.5 * log_det_spd(st.covariance()) - 0.5 * d * (1.0 + kLog2Pi);
}

} // namespace

void bw_step(double tau, double alpha, DescentState& st, MomentEstimator& est,
             const PotentialTarget& pot) {
    Moments mom = est.estimate(st.params(), pot);
    bw_step_with(tau, alpha, st, mom);
}

void fr_step(double tau, double beta, DescentState& st, MomentEstimator& est,
             const PotentialTarget& pot) {
    Moments mom = est.estimate(st.params(), pot);
    fr_step_with(tau, beta, st, mom);
}

void mass_step(double tau, double beta, DescentState& st, const PotentialTarget& pot,
               MomentEstimator& est) {
    if (beta == 0.0) return;
    if (!pot.normalizer_known && pot.kind != PotentialTarget::Kind::gaussian_quadratic)
        return;   // disabled, as for logistic regression
    Moments mom;
    if (pot.kind != PotentialTarget::Kind::gaussian_quadratic)
        mom = est.estimate(st.params(), pot);
    double varkappa = 1.0;
    double h = shape_entropy(st, pot, mom, &varkappa);
    mass_step_with(tau, beta, st, h, varkappa);
}

namespace {

double kl_record(DescentState& st, const PotentialTarget& pot, MomentEstimator& est,
                 bool with_mass) {
    if (pot.kind == PotentialTarget::Kind::gaussian_quadratic && pot.gaussian) {
        if (with_mass) return relative_entropy(st.params(), *pot.gaussian);
        return relative_entropy_normalized(st.covariance(), st.m, *pot.gaussian);
    }
    Moments mom = est.estimate(st.params(), pot);
    const int d = static_cast<int>(st.m.size());
    return mom.value - 0.5 * log_det_spd(st.covariance()) - 0.5 * d * (1.0 + kLog2Pi);
}

double tail_rate(const std::vector<DescentRecord>& recs, double tau) {
    std::size_t start = recs.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = start; i < recs.size(); ++i) {
        if (recs[i].kl_estimate <= 1e-300) continue;
        double x = recs[i].step * tau, y = std::log(recs[i].kl_estimate);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    double det = n * sxx - sx * sx;
    return det == 0.0 ? 0.0 : -(n * sxy - sx * sy) / det;
}

} // namespace

DescentResult run_descent(const DescentConfig& cfg, const ScaledGaussianParams& p0,
                          const PotentialTarget& pot) {
    cfg.validate();
    MomentEstimator est = [&] {
        switch (cfg.estimator_mode) {
            case MomentEstimator::Mode::exact_gaussian: return MomentEstimator::exact();
            case MomentEstimator::Mode::gauss_hermite: return MomentEstimator::gauss_hermite(cfg.gh_nodes);
            default: return MomentEstimator::monte_carlo(cfg.n_mc, cfg.seed);
        }
    }();
    // KL tracking draws from a separate stream so it cannot perturb the updates
    MomentEstimator kl_est = MomentEstimator::monte_carlo(cfg.n_mc, cfg.seed ^ 0x5bf03635ULL);
    const bool gaussian_target =
        pot.kind == PotentialTarget::Kind::gaussian_quadratic && pot.gaussian.has_value();

    DescentState st = DescentState::from_params(p0);
    DescentResult out;
    out.steps.reserve(cfg.n_steps + 1);

    for (int k = 0; k <= cfg.n_steps; ++k) {
        DescentRecord rec;
        rec.step = k;
        rec.kl_estimate = kl_record(st, pot, gaussian_target ? est : kl_est, cfg.track_mass);
        rec.m = st.m;
        rec.sigma = st.covariance();
        rec.kappa = st.kappa;
        out.steps.push_back(std::move(rec));
        if (k == cfg.n_steps) break;

        try {
            // one moment estimate per iteration; the BW and FR halves share
            // it unless a mid-step re-sample is requested
            Moments mom = est.estimate(st.params(), pot);
            double h_start = 0.0, varkappa = 1.0;
            if (cfg.track_mass) h_start = shape_entropy(st, pot, mom, &varkappa);

            bw_step_with(cfg.tau, cfg.alpha, st, mom);
            if (cfg.resample_midstep) mom = est.estimate(st.params(), pot);
            fr_step_with(cfg.tau, cfg.beta, st, mom);
            if (cfg.track_mass) mass_step_with(cfg.tau, cfg.beta, st, h_start, varkappa);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " at iteration " + std::to_string(k));
        }
    }
    out.conversions = st.conversions;
    out.fitted_rate = tail_rate(out.steps, cfg.tau);
    return out;
}

ScaledGaussianParams DescentResult::final() const {
    const DescentRecord& r = steps.back();
    return ScaledGaussianParams(r.sigma, r.m, r.kappa);
}

VectorXd newton_minimize(const PotentialTarget& pot, VectorXd theta, int max_iter, double tol) {
    double v = pot.value(theta);
    for (int it = 0; it < max_iter; ++it) {
        VectorXd g = pot.grad(theta);
        if (g.norm() <= tol * (1.0 + std::abs(v))) break;
        MatrixXd H = symmetrize(pot.hess(theta));
        double lm = 0.0;
        Eigen::LLT<MatrixXd> llt(H);
        while (llt.info() != Eigen::Success) {
            lm = (lm == 0.0) ? 1e-8 : lm * 10.0;
            llt.compute(H + lm * MatrixXd::Identity(H.rows(), H.cols()));
            if (lm > 1e8) throw NumericalError("newton_minimize: Hessian unusable");
        }
        VectorXd step = llt.solve(g);
        double t = 1.0;
        while (t > 1e-12 && pot.value(theta - t * step) > v - 1e-4 * t * g.dot(step)) t *= 0.5;
        theta -= t * step;
        v = pot.value(theta);
    }
    return theta;
}

} // namespace hkgf
