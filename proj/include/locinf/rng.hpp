#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <unordered_set>
#include <vector>

namespace locinf {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed splitting: every (seed, stream) pair maps to an independent-looking 64-bit seed.
/// Replicate r of a run uses derive_seed(seed, r); auxiliary streams use the
/// reserved stream ids below.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

namespace stream_id {
inline constexpr std::uint64_t kGroundTruth = 0xffff'0000'0000'0001ULL;
inline constexpr std::uint64_t kArmSelection = 0xffff'0000'0000'0002ULL;
inline constexpr std::uint64_t kEnvironment = 0xffff'0000'0000'0003ULL;
inline constexpr std::uint64_t kValidation = 0xffff'0000'0000'0004ULL;
} // namespace stream_id

/// Uniform double in [0, 1).
template <class URBG>
double uniform01(URBG& rng) {
    return std::generate_canonical<double, std::numeric_limits<double>::digits>(rng);
}

/// Number of failures before the first success of a Bernoulli(p) sequence, 0 < p <= 1.
/// Saturates at `limit` so callers can compare against a remaining range.
template <class URBG>
std::int64_t geometric_skip(URBG& rng, double p, std::int64_t limit) {
    if (p >= 1.0) {
        return 0;
    }
    const double u = uniform01(rng);
    const double skip = std::floor(std::log1p(-u) / std::log1p(-p));
    if (!(skip < static_cast<double>(limit))) {
        return limit;
    }
    return static_cast<std::int64_t>(skip);
}

/// k distinct values from [0, n), uniformly, in the order Floyd's algorithm picks them.
template <class URBG>
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, URBG& rng) {
    if (k > n) {
        k = n;
    }
    std::vector<std::size_t> picked;
    picked.reserve(k);
    std::unordered_set<std::size_t> seen;
    seen.reserve(k * 2);
    for (std::size_t j = n - k; j < n; ++j) {
        std::uniform_int_distribution<std::size_t> draw(0, j);
        std::size_t t = draw(rng);
        if (seen.count(t) != 0) {
            t = j;
        }
        seen.insert(t);
        picked.push_back(t);
    }
    return picked;
}

} // namespace locinf
