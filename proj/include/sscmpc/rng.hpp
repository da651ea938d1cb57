#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace sscmpc {

/// splitmix64 step; used for seeding and for deriving substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic substream derivation: fold each path element into the seed
/// through splitmix64. Used to give every (run, purpose) pair an independent
/// stream, e.g. derive_seed(base, {run_index, kWorldStream}).
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = base;
    std::uint64_t h = splitmix64(s);
    for (std::uint64_t p : path) {
        s = h ^ (p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
        h = splitmix64(s);
    }
    return h;
}

inline constexpr std::uint64_t kWorldStream = 0x776f726c64ULL;  // "world"
inline constexpr std::uint64_t kControllerStream = 0x6374726cULL;  // "ctrl"
inline constexpr std::uint64_t kScenarioStream = 0x7363656eULL;  // "scen"

/// xoshiro256++ generator. All randomness in the project flows through this
/// class so that runs are bit-reproducible across platforms; never std::random.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller. Consumes two uniforms per pair and
    /// caches the second value, so the draw sequence is fully deterministic.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        // avoid log(0)
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace sscmpc
