#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ncrc {

using Rng = std::mt19937_64;

/// Stable substream seed for (master, component, index). Depends only on its
/// arguments, so results never depend on the order substreams are consumed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view component, std::uint64_t index = 0) noexcept;

inline Rng make_rng(std::uint64_t master, std::string_view component, std::uint64_t index = 0)
{
    return Rng(derive_seed(master, component, index));
}

/// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) noexcept
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) noexcept
{
    return lo + (hi - lo) * uniform01(rng);
}

} // namespace ncrc
