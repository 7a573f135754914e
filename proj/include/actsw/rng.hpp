#pragma once

#include <cstdint>

namespace actsw {

// Deterministic 64-bit generator (splitmix64). Used for every seeded choice
// in the simulator so runs are reproducible bit-for-bit across platforms and
// standard libraries.
struct SplitMix64 {
    std::uint64_t state = 0;

    constexpr explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform-ish pick in [0, n). Modulo bias is irrelevant at the sizes
    // used here (instance groups of a handful of members).
    constexpr std::uint64_t pick(std::uint64_t n) { return next() % n; }
};

// One-shot mix of several words into a single value. Stable across builds.
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0, std::uint64_t d = 0) {
    SplitMix64 g(a ^ 0x6a09e667f3bcc909ULL);
    std::uint64_t h = g.next();
    g.state ^= b;
    h ^= g.next();
    g.state ^= c;
    h ^= g.next();
    g.state ^= d;
    h ^= g.next();
    return h;
}

}  // namespace actsw
