// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sdb {

// Deterministic RNG used everywhere in the artifact. Gaussian and integer
// draws are hand-rolled on top of mt19937_64 so that streams are
// reproducible bit-for-bit regardless of the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed), seed_(seed) {}

    // Uniform double in [0, 1).
    double uniform() {
        // 53 random bits -> [0,1) with full double resolution.
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (cosine branch only, no cached spare).
    double gaussian() {
        const double u1 = 1.0 - uniform();  // (0,1], keeps log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    int uniform_int(int n) {
        const uint64_t un = static_cast<uint64_t>(n);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<int>(x % un);
    }

    // Derive an independent child stream keyed off the construction seed;
    // does not advance this stream.
    Rng fork(uint64_t stream) const { return Rng(mix(seed_, stream)); }

    // Construct with an explicit (seed, stream) pair.
    static Rng from(uint64_t seed, uint64_t stream) { return Rng(mix(seed, stream)); }

private:
    // splitmix64-style mixing of (seed, stream) into one 64-bit state.
    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
    uint64_t seed_;
};

}  // namespace sdb
