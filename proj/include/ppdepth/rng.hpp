#pragma once

#include <cstdint>
#include <random>

namespace ppdepth {

/// The project-wide generator. Streams are derived from (seed, index) so
/// that work split across threads draws the same numbers in any partition.
using Rng = std::mt19937_64;

inline constexpr const char* rng_name = "mt19937_64/splitmix64-streams";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(derive_seed(seed, index));
}

} // namespace ppdepth
