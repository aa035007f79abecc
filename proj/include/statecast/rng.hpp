#pragma once

#include <cmath>
#include <cstdint>

namespace statecast {

// Deterministic random helpers. The standard <random> distributions are
// implementation-defined, which would make generated traces differ between
// standard libraries, so the few draws we need are spelled out explicitly
// on top of splitmix64.

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless mix of several integers into one seed. Used to make per-packet
// loss draws independent of processing order.
inline uint64_t hash_mix(uint64_t a, uint64_t b, uint64_t c = 0) {
    uint64_t s = a * 0x9e3779b97f4a7c15ULL + b * 0xc2b2ae3d27d4eb4fULL +
                 c * 0x165667b19e3779f9ULL + 0x27d4eb2f165667c5ULL;
    splitmix64(s);
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // Burn a couple of outputs so small seeds decorrelate.
        splitmix64(state_);
        splitmix64(state_);
    }

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller; the spare value is cached so consecutive draws stay cheap.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Lognormal parameterized by the target mean and coefficient of
    // variation of the resulting distribution (not of the underlying normal).
    double lognormal_mean_cv(double mean, double cv) {
        double sigma2 = std::log(1.0 + cv * cv);
        double mu = std::log(mean) - 0.5 * sigma2;
        return std::exp(mu + std::sqrt(sigma2) * normal());
    }

    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + int(next_u64() % uint64_t(hi - lo + 1));
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// One-off uniform draw from a stateless hash, for order-independent sampling.
inline double hash_uniform01(uint64_t a, uint64_t b, uint64_t c = 0) {
    return double(hash_mix(a, b, c) >> 11) * 0x1.0p-53;
}

} // namespace statecast
