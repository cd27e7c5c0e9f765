#pragma once

#include <cstdint>
#include <random>

namespace onebit {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; decorrelates nearby counters.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream from a base seed and up to two counters
// (e.g. configuration index and replication). Pure function of its inputs,
// so any trial can be regenerated in isolation regardless of execution order.
inline Rng make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
    return Rng(splitmix64(seed ^ splitmix64(a ^ splitmix64(b))));
}

} // namespace onebit
