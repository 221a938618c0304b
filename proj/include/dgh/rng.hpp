#pragma once

#include <cstdint>

#include "dgh/integer.hpp"

namespace dgh {

/// SplitMix64 (Vigna's public-domain reference constants): a counter stepped
/// by the 64-bit golden ratio and pushed through a two-round finalizer. The
/// seed fully determines the stream, which is what the reproducibility
/// contract of the statistics module rests on.
struct split_mix64 {
    std::uint64_t state;

    explicit split_mix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

/// One finalizer round; used to decorrelate (seed, index) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Independent substream for one sample slot. Results depend on (seed, index)
/// only, never on which thread runs the slot.
inline split_mix64 substream(std::uint64_t seed, std::uint64_t index) {
    return split_mix64(mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15ULL)));
}

/// Unbiased uniform draw from [0, n), n > 0 (Lemire's multiply-shift method).
inline std::uint64_t uniform_below(split_mix64& rng, std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(rng.next()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        std::uint64_t threshold = (0 - n) % n;
        while (lo < threshold) {
            m = static_cast<unsigned __int128>(rng.next()) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform big integer in [0, 2^bits).
inline Int random_bits(split_mix64& rng, unsigned bits) {
    Int r = 0;
    unsigned filled = 0;
    while (filled < bits) {
        r <<= 64;
        r |= rng.next();
        filled += 64;
    }
    return r >> (filled - bits);
}

/// Uniform big integer in [0, n) by rejection on the bit width of n - 1.
inline Int uniform_int_below(split_mix64& rng, const Int& n) {
    DGH_CHECK(n > 0, "uniform_int_below requires n > 0");
    if (n == 1) return 0;
    unsigned bits = boost::multiprecision::msb(Int(n - 1)) + 1;
    for (;;) {
        Int candidate = random_bits(rng, bits);
        if (candidate < n) return candidate;
    }
}

} // namespace dgh
