#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace rcb {

// Deterministic, platform-independent RNG. std::mt19937 + distributions are
// not guaranteed bit-stable across standard libraries, and the brute-force
// oracle must be able to replay every stream, so all randomness in the
// project goes through this splitmix64 generator.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, n), n >= 1 (rejection sampling).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    bool next_bool() { return (next_u64() & 1u) != 0; }

private:
    std::uint64_t state_;
};

// Derives a child seed from a parent seed and a label. Chained calls build
// hierarchical substreams: mix(mix(master, procedure), index).
inline std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t label) {
    std::uint64_t s = parent ^ (0x9E3779B97F4A7C15ull + label + (parent << 6) + (parent >> 2));
    return splitmix64_next(s);
}

// FNV-1a, for keying substreams by item id.
inline std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

// Fixed procedure labels so enabling one analysis section never perturbs
// another's streams.
namespace seed_label {
inline constexpr std::uint64_t split_half = 0x53504C49u;   // "SPLI"
inline constexpr std::uint64_t permutation = 0x5045524Du;  // "PERM"
inline constexpr std::uint64_t synthesis = 0x53594E54u;    // "SYNT"
}  // namespace seed_label

// In-place Fisher-Yates shuffle driven by the shared generator.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace rcb
