#pragma once

#include <cstdint>
#include <random>

namespace dynperc {

// SplitMix64 finalizer; bijective, used to decorrelate (seed, stream) pairs
// before feeding a single 64-bit state into mt19937_64.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic stream derivation: replica r, substream s of a master seed.
// Any (master, stream) pair yields an independent-for-practical-purposes engine,
// so replica results do not depend on scheduling or batch order.
inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream = 0) {
    return std::mt19937_64(mix64(mix64(master) ^ mix64(0x5851f42d4c957f2dull * (stream + 1))));
}

inline std::uint64_t replica_stream(std::uint64_t replica, std::uint64_t substream = 0) {
    return replica * 64ull + substream;
}

}  // namespace dynperc
