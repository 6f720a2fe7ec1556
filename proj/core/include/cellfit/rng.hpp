#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace cellfit {

// All randomness in the library flows through this generator so results are
// bit-identical across platforms and standard-library implementations.
// xoshiro256++ seeded through splitmix64; distributions are implemented here
// rather than taken from <random>, whose mappings are implementation-defined.

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One root seed governs a run; stage streams are derived by mixing a stage
// tag and a counter so each pipeline stage is independently reproducible.
enum class SeedStream : uint64_t {
    split = 1,     // train/validation partitioning
    learner = 2,   // learner fits (forest bootstraps etc.)
    synth = 3,     // synthetic data generation
    report = 4,    // evaluation harness
    generic = 5,
};

inline uint64_t derive_seed(uint64_t base, SeedStream stream, uint64_t counter = 0) {
    uint64_t s = base ^ (0x6a09e667f3bcc909ULL * (static_cast<uint64_t>(stream) + 1));
    uint64_t z = splitmix64(s);
    s ^= counter * 0xbb67ae8584caa73bULL;
    z ^= splitmix64(s);
    return z;
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // unbiased integer in [0, n), Lemire's method
    uint64_t uniform_int(uint64_t n) {
        uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<uint64_t>(m);
        if (lo < n) {
            const uint64_t threshold = (0ULL - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    // Box-Muller; consumes exactly two uniforms per variate
    double normal(double mean = 0.0, double sd = 1.0) {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
        return mean + sd * z;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(uniform_int(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<uint64_t, 4> state_{};
};

} // namespace cellfit
