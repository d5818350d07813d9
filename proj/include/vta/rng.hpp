#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vta {

// Deterministic random helpers. std::mt19937 is fully specified by the
// standard; the distributions below are hand-rolled so streams are identical
// across standard libraries (std::*_distribution is implementation-defined).

inline float uniform_float(std::mt19937& g) {
    return static_cast<float>(g() >> 8) * (1.0f / 16777216.0f);  // [0, 1)
}

inline float uniform_range(std::mt19937& g, float lo, float hi) {
    return lo + (hi - lo) * uniform_float(g);
}

// Box-Muller, one value per two draws.
inline float normal_float(std::mt19937& g) {
    const double u1 = (static_cast<double>(g() >> 8) + 1.0) * (1.0 / 16777216.0);  // (0, 1]
    const double u2 = static_cast<double>(g() >> 8) * (1.0 / 16777216.0);
    return static_cast<float>(std::sqrt(-2.0 * std::log(u1)) *
                              std::cos(2.0 * 3.14159265358979323846 * u2));
}

// Counter-based hash, for per-cell noise that is seed-deterministic and
// order-independent (safe under any parallel schedule).
inline uint32_t hash_u32(uint32_t x) {
    x ^= x >> 16;
    x *= 0x7feb352dU;
    x ^= x >> 15;
    x *= 0x846ca68bU;
    x ^= x >> 16;
    return x;
}

inline float hash_unit_float(uint32_t x) {
    return static_cast<float>(hash_u32(x) >> 8) * (1.0f / 16777216.0f);  // [0, 1)
}

}  // namespace vta
