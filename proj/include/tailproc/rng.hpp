#pragma once

// Deterministic random number generation.  All randomness in the library
// flows through these routines so that a (seed, stream index) pair fully
// determines every sample, independently of platform and standard library.

#include <cmath>
#include <cstdint>

namespace tailproc {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

// One step of the SplitMix64 output function.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += kSplitMixGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derive a per-stream seed from a master seed and a stream index.  Used for
// Monte Carlo replications so results do not depend on worker scheduling.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (stream * kSplitMixGamma + 0x2545F4914F6CDD1DULL);
    splitmix64(s);
    return splitmix64(s);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(master, a), b);
}

// xoshiro256** seeded through SplitMix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
        has_cached_normal_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1), never exactly 0 or 1.
    double uniform() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    // Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        cached_normal_ = r * std::sin(theta);
        has_cached_normal_ = true;
        return r * std::cos(theta);
    }

    bool coin() { return (next_u64() & 1ULL) != 0; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace tailproc
