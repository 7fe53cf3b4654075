#pragma once

#include <cstdint>

namespace polbell {

// Derives an independent 64-bit seed for a numbered stream (pulse index,
// sample index, ...) from a base seed.  splitmix64 finalizer; every stream
// gets its own freshly-seeded engine, which makes batch results independent
// of how the batch is split across threads.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace polbell
