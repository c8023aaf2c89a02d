#pragma once

#include <cstdint>
#include <random>

namespace coilsketch {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; decorrelates nearby integer seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for the `index`-th independent stream derived from `seed`.
constexpr std::uint64_t seed_stream(std::uint64_t seed, std::uint64_t index) noexcept
{
    return mix_seed(mix_seed(seed) ^ mix_seed(index + 0x5851f42d4c957f2dULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0)
{
    return Rng(seed_stream(seed, stream));
}

}  // namespace coilsketch
