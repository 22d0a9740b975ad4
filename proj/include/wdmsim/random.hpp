#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wdmsim {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream tags keep the traffic, placement, topology and decision streams
/// of one replication apart.
enum class Stream : std::uint64_t {
    topology = 0x746f706fULL,
    traffic = 0x74726166ULL,
    placement = 0x706c6163ULL,
    decision = 0x64656369ULL,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream tag, std::uint64_t index = 0) noexcept {
    return mix64(mix64(seed ^ static_cast<std::uint64_t>(tag)) + mix64(index + 1));
}

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw, so the
/// sequence is identical across standard library implementations.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Uses rejection so it is unbiased and portable.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

inline double exponential(Rng& rng, double mean) {
    return -mean * std::log1p(-uniform01(rng));
}

}  // namespace wdmsim
