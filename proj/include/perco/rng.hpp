#pragma once

#include <cstdint>
#include <random>

namespace perco {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used as the seed mixing
// primitive so that ensembles stay reproducible and order-independent:
// every (base_seed, index, stream) triple maps to one fixed 64-bit seed,
// regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed derivation scheme "splitmix64-v1":
//   child(base, k)         = splitmix64(base ^ splitmix64(k + 1))
//   child(base, k, stream) = splitmix64(child(base, k) ^ splitmix64(stream + 0x100))
inline std::uint64_t child_seed(std::uint64_t base, std::uint64_t k) {
    return splitmix64(base ^ splitmix64(k + 1));
}

inline std::uint64_t child_seed(std::uint64_t base, std::uint64_t k, std::uint64_t stream) {
    return splitmix64(child_seed(base, k) ^ splitmix64(stream + 0x100));
}

inline constexpr const char* kSeedSchemeVersion = "splitmix64-v1";

// Uniform double in [0, 1), 53 random bits.
inline double canonical_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe as a log() argument.
inline double positive_unit(std::mt19937_64& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Unbiased integer in [0, bound), bound >= 1 (Lemire's multiply-shift with
// rejection). Avoids the library-dependent behaviour of
// std::uniform_int_distribution so results are identical across platforms.
inline std::uint64_t bounded_u64(std::mt19937_64& rng, std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (lo < threshold) {
            m = static_cast<unsigned __int128>(rng()) * bound;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace perco
