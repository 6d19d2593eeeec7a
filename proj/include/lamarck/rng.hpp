#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lamarck {

using Rng = std::mt19937_64;

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace detail

/// Seed for one (generation, entity, purpose) triple. Every random stream in a
/// run is derived this way, so worker scheduling never changes the results.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::int64_t generation,
                                           std::int64_t index, std::string_view tag) {
    std::uint64_t h = detail::splitmix64(master);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(generation));
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(index));
    h = detail::splitmix64(h ^ detail::fnv1a(tag));
    return h;
}

inline Rng make_rng(std::uint64_t master, std::int64_t generation, std::int64_t index,
                    std::string_view tag) {
    return Rng{derive_seed(master, generation, index, tag)};
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>{0.0, 1.0}(rng); }

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>{lo, hi}(rng);
}

inline double gaussian(Rng& rng, double mean, double sd) {
    return std::normal_distribution<double>{mean, sd}(rng);
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>{0, n - 1}(rng);
}

}  // namespace lamarck
