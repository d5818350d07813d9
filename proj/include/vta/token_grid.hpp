#pragma once

#include <cstddef>
#include <vector>

namespace vta {

// The evolving (frames x patches x dim) feature tensor. token_size[t][l] and
// frame_size[t] track how many original cells each slot represents:
// sum over all slots of token_size * frame_size stays equal to the original
// T*L through any sequence of merges (conservation of constituents).
struct TokenGrid {
    int frames = 0;   // T_i
    int patches = 0;  // L_i, per frame
    int dim = 0;      // D
    std::vector<float> features;    // [t][l][d]
    std::vector<float> token_size;  // [t][l], >= 1
    std::vector<float> frame_size;  // [t], >= 1
    std::vector<float> cls;         // [d]

    TokenGrid() = default;
    TokenGrid(int t, int l, int d)
        : frames(t), patches(l), dim(d),
          features(static_cast<size_t>(t) * l * d, 0.0f),
          token_size(static_cast<size_t>(t) * l, 1.0f),
          frame_size(static_cast<size_t>(t), 1.0f),
          cls(static_cast<size_t>(d), 0.0f) {}

    float* feat(int t, int l) {
        return features.data() + (static_cast<size_t>(t) * patches + l) * dim;
    }
    const float* feat(int t, int l) const {
        return features.data() + (static_cast<size_t>(t) * patches + l) * dim;
    }
    float size_of(int t, int l) const { return token_size[static_cast<size_t>(t) * patches + l]; }
    float& size_of(int t, int l) { return token_size[static_cast<size_t>(t) * patches + l]; }

    int token_count() const { return frames * patches; }

    double constituent_count() const {
        double s = 0.0;
        for (int t = 0; t < frames; ++t)
            for (int l = 0; l < patches; ++l)
                s += static_cast<double>(size_of(t, l)) * frame_size[t];
        return s;
    }
};

}  // namespace vta
