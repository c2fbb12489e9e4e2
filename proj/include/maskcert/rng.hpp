#pragma once

#include <cstdint>
#include <initializer_list>

namespace maskcert {

// Stateless splitmix64 finalizer (Steele/Lea/Vigna).
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash a tuple of seed components into one 64-bit stream seed.
// Every sample in the engine gets its own stream, so generation order
// and worker count never affect the draws.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x8f1bbcdcbfa53e0bULL;
    for (std::uint64_t p : parts) {
        h = splitmix64_mix(h ^ p);
    }
    return h;
}

// Minimal deterministic PRNG. std::uniform_int_distribution is
// implementation-defined, so bounded draws are done here explicitly.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased uniform draw in [0, bound); bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Domain separation tags for derived seed streams.
namespace seed_purpose {
inline constexpr std::uint64_t kSmoothingDraw = 0x736d6f6f7468ULL;
inline constexpr std::uint64_t kBetaOuter = 0x626f75746572ULL;
inline constexpr std::uint64_t kBetaInner = 0x62696e6e6572ULL;
inline constexpr std::uint64_t kTrainMask = 0x747261696e6dULL;
inline constexpr std::uint64_t kCorpus = 0x636f72707573ULL;
}  // namespace seed_purpose

}  // namespace maskcert
