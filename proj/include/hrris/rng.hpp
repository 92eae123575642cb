// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace hrris {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Named streams split from one trial seed. Every solver mode of a trial
// reads the same streams, so they see identical channels and initial phases.
// Fading is split per link so that a link's draws do not shift when the
// dimensions of another link change.
enum class Substream : std::uint64_t {
    fading_user_en = 1,
    fading_user_hrris = 2,
    fading_hrris_en = 3,
    fading_user_eve = 4,
    csi_error = 5,
    phase_init = 6,
};

inline Rng substream(std::uint64_t seed, Substream tag)
{
    return Rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag))));
}

// Circularly-symmetric complex Gaussian with unit variance.
inline std::complex<double> complex_normal(Rng& rng)
{
    std::normal_distribution<double> half(0.0, std::sqrt(0.5));
    const double re = half(rng);
    const double im = half(rng);
    return {re, im};
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

} // namespace hrris
