#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace polarnet {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent per-entity seeds from a
// global seed so parallel work never shares generator state.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Unbiased draw in [0, n). Hand-rolled rejection instead of
// std::uniform_int_distribution so sequences are pinned to the engine alone.
inline std::uint64_t draw_below(Rng& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double draw_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Marsaglia polar method (one value per call, the mate
// is discarded to keep call sites stateless).
inline double draw_normal(Rng& rng) {
    for (;;) {
        const double u = 2.0 * draw_unit(rng) - 1.0;
        const double v = 2.0 * draw_unit(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

inline double draw_exponential(Rng& rng) {
    return -std::log1p(-draw_unit(rng));
}

template <class T>
void shuffle_vec(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[draw_below(rng, i)]);
    }
}

// k distinct indices from [0, n), in random order.
inline std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k, Rng& rng) {
    std::vector<std::uint32_t> pool(n);
    for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
    for (std::uint32_t i = 0; i < k && i + 1 < n; ++i) {
        std::swap(pool[i], pool[i + draw_below(rng, n - i)]);
    }
    pool.resize(std::min(n, k));
    return pool;
}

// Discrete heavy-tailed draw: floor(Pareto(alpha, xmin)), so P(X >= x) ~ x^{1-alpha}.
inline std::uint32_t draw_power_law(Rng& rng, double alpha, std::uint32_t xmin) {
    const double u = draw_unit(rng);
    const double x = static_cast<double>(xmin) * std::pow(1.0 - u, -1.0 / (alpha - 1.0));
    const double capped = std::min(x, 1e7);
    return static_cast<std::uint32_t>(capped);
}

} // namespace polarnet
