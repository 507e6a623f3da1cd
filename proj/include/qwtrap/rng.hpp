#pragma once

#include <cstdint>

namespace qwtrap {

// SplitMix64. All disorder sampling goes through this generator so that a
// (master_seed, configuration index) pair maps to the same draws on every
// platform; the standard library distributions make no such promise.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound), bound > 0. Classic rejection on the
    // low 2^64 % bound values.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool next_bool() { return (next() >> 63) != 0; }

private:
    std::uint64_t state_;
};

// Counter-based seed split: child streams for configuration r, and purpose
// streams within a configuration, never share state with the parent. Any
// configuration can be reproduced in isolation from (parent, index).
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    SplitMix64 g(parent ^ (0xd1342543de82ef95ULL * (index + 1)));
    return g.next();
}

} // namespace qwtrap
