#pragma once

#include <random>

#include "vta/encoder.hpp"
#include "vta/matrix.hpp"
#include "vta/rng.hpp"
#include "vta/video.hpp"

inline vta::Matrix random_matrix(int rows, int cols, uint32_t seed, float lo = -1.0f,
                                 float hi = 1.0f) {
    std::mt19937 g(seed);
    vta::Matrix m(rows, cols);
    for (auto& v : m.data) v = vta::uniform_range(g, lo, hi);
    return m;
}

inline vta::Matrix random_row_stochastic(int n, uint32_t seed) {
    std::mt19937 g(seed);
    vta::Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const float v = vta::uniform_range(g, 0.01f, 1.0f);
            m.at(i, j) = v;
            sum += v;
        }
        for (int j = 0; j < n; ++j)
            m.at(i, j) = static_cast<float>(m.at(i, j) / sum);
    }
    return m;
}

inline vta::RawVideo random_video(int frames, int height, int width, uint32_t seed) {
    std::mt19937 g(seed);
    vta::RawVideo v(frames, height, width);
    for (auto& p : v.pixels) p = vta::uniform_float(g);
    return v;
}

// Small valid config for encoder-level tests.
inline vta::EncoderConfig small_config(uint32_t seed = 1) {
    vta::EncoderConfig cfg;
    cfg.frames = 8;
    cfg.height = 32;
    cfg.width = 32;
    cfg.patch = 8;  // L = 16
    cfg.dim = 32;
    cfg.heads = 4;
    cfg.blocks = 2;
    cfg.reduce_t = 2;
    cfg.reduce_s = 4;
    cfg.strategy = vta::Strategy::geometry;
    cfg.seed = seed;
    return cfg;
}
