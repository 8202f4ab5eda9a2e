#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace gmk {

/// Seeded generator with explicitly coded distributions, so that identical
/// seeds give identical streams on every platform and standard library.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return std::ldexp(static_cast<double>(gen_() >> 11), -53); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one spare value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform direction on S^{dim-1}, dim in {2,3}.
    std::array<double, 3> direction(int dim) {
        std::array<double, 3> v{0.0, 0.0, 0.0};
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (int i = 0; i < dim; ++i) {
                v[i] = normal();
                norm2 += v[i] * v[i];
            }
        } while (norm2 < 1e-12);
        const double inv = 1.0 / std::sqrt(norm2);
        for (int i = 0; i < dim; ++i) v[i] *= inv;
        return v;
    }

    uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gmk
