#include "current_lab/rng.hpp"

namespace current_lab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

SeedSpec SeedSpec::substream(std::uint64_t index) const {
    return {seed, splitmix64(splitmix64(stream) ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

Rng make_rng(const SeedSpec& seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.seed >> 32),
                      static_cast<std::uint32_t>(seed.stream),
                      static_cast<std::uint32_t>(seed.stream >> 32)};
    return Rng(seq);
}

}  // namespace current_lab
