#pragma once

#include <cstdint>
#include <random>

namespace platoon {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to decorrelate derived stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for one Monte-Carlo sample. Streams depend only on the triple, so
/// samples can be generated in any order.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t cell_id,
                                    std::uint64_t sample_index) {
    return mix64(mix64(mix64(master_seed) ^ cell_id) ^ sample_index);
}

inline Rng make_rng(std::uint64_t master_seed, std::uint64_t cell_id, std::uint64_t sample_index) {
    return Rng{derive_seed(master_seed, cell_id, sample_index)};
}

// std::uniform_real_distribution is implementation-defined; this is not.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace platoon
