#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gelsim {

// All randomness in a run flows from one root seed through named
// sub-streams, so each module draws from an independent deterministic
// sequence regardless of call order elsewhere.
inline std::uint64_t substream_seed(std::uint64_t root, std::string_view name) {
    std::uint64_t h = root ^ 0x9e3779b97f4a7c15ull;
    for (char c : name) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
    }
    // splitmix64 finalizer
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t root, std::string_view name) {
    return std::mt19937_64(substream_seed(root, name));
}

}  // namespace gelsim
