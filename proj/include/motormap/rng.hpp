#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace motormap {

// std::mt19937_64 output is pinned by the standard; the std::*_distribution
// adapters are not. Everything random in this project goes through the two
// transforms below so results are bit-identical on every platform.

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
}

/// Standard normal deviates via Box-Muller, pairs cached.
class GaussianSampler {
public:
    explicit GaussianSampler(Rng& rng) : rng_(rng) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(rng_);
        double u2 = uniform01(rng_);
        // guard log(0)
        while (u1 <= 0.0) u1 = uniform01(rng_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    Rng& rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace motormap
