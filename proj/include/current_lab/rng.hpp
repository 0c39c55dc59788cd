#pragma once

#include <cstdint>
#include <random>

namespace current_lab {

using Rng = std::mt19937_64;

/// (master seed, stream id). Equal pairs give identical streams; distinct
/// pairs give independently seeded streams.
struct SeedSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Deterministic child stream, e.g. one per replica or per purpose.
    SeedSpec substream(std::uint64_t index) const;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

Rng make_rng(const SeedSpec& seed);

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Exp(1) variate.
inline double standard_exponential(Rng& rng) { return std::exponential_distribution<double>(1.0)(rng); }

}  // namespace current_lab
