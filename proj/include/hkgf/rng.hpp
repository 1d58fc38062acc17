#ifndef HKGF_RNG_HPP
#define HKGF_RNG_HPP

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace hkgf {

/// Seeded RNG with a self-contained normal sampler (Box-Muller over
/// mt19937_64) so that runs are reproducible independent of the standard
/// library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(scramble(seed)) {}

    /// Derive an independent stream, e.g. per-sample or per-batch.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(scramble(seed) ^ scramble(index * 0x9e3779b97f4a7c15ULL + 1));
    }

    double uniform() {
        // in (0, 1]
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Eigen::VectorXd normal_vector(int d) {
        Eigen::VectorXd v(d);
        for (int i = 0; i < d; ++i) v(i) = normal();
        return v;
    }

    Eigen::MatrixXd random_symmetric(int d) {
        Eigen::MatrixXd M(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) M(i, j) = normal();
        return 0.5 * (M + M.transpose());
    }

    /// Random SPD matrix with log-eigenvalues uniform in [-log_range, log_range].
    Eigen::MatrixXd random_spd(int d, double log_range = 1.0);

    std::uint64_t raw() { return gen_(); }

private:
    static std::uint64_t scramble(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace hkgf

#endif
