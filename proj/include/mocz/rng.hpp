// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "mocz/types.hpp"

namespace mocz {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive decorrelated substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent generator for (seed, stream, index). Results never depend on
// which worker thread consumes the stream.
inline Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
{
    return Rng(mix64(mix64(mix64(seed) ^ stream) ^ index));
}

// Circular complex Gaussian with E|z|^2 = variance.
inline cdouble complex_gaussian(Rng& rng, double variance)
{
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

} // namespace mocz
