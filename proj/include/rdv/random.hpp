#pragma once

#include <cstdint>
#include <random>

namespace rdv {

// Portable draws: std:: distributions are implementation-defined, the engine is not.

inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

inline double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream));
}

}  // namespace rdv
