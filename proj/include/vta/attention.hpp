#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "vta/matrix.hpp"
#include "vta/token_grid.hpp"

namespace vta {

struct AttnSublayerWeights {
    Matrix wq, wk, wv, wo;              // D x D each, no bias
    std::vector<float> ln_gamma, ln_beta;  // D
};

struct FfnWeights {
    Matrix w1;  // D x 4D
    Matrix w2;  // 4D x D
    std::vector<float> ln_gamma, ln_beta;
};

struct BlockWeights {
    int dim = 0;
    int heads = 0;  // must divide dim
    AttnSublayerWeights temporal;
    AttnSublayerWeights spatial;
    FfnWeights ffn;

    static BlockWeights seeded(int dim, int heads, std::mt19937& g);
    // All projections zero, layer norms identity. Attention and the MLP then
    // reduce to the residual path; merging is the only transform left.
    static BlockWeights zeros(int dim, int heads);
};

// Keys and head-averaged attention captured for the aggregation module.
// For temporal attention: keys is T_i x D (token_size-weighted mean over
// patch positions of each frame's keys) and attn is T_i x T_i (mean over
// positions and heads). For spatial attention: keys is L_i x D and attn is
// L_i x L_i, both plain means over frames (and heads), cls row/column
// dropped without renormalizing.
struct AttnStats {
    Matrix keys;
    Matrix attn;
    // Filled only when requested (per-frame spatial planning).
    std::vector<Matrix> keys_per_frame;
    std::vector<Matrix> attn_per_frame;
};

// Multi-head self-attention over the length-T_i sequence at each patch
// position (pre-norm, residual). Updates the grid in place. cls does not
// participate.
AttnStats temporal_attention(TokenGrid& grid, const BlockWeights& w);

// Multi-head self-attention over each frame's patches with the shared cls
// prepended; per-frame cls outputs are mean-combined into the new cls.
AttnStats spatial_attention(TokenGrid& grid, const BlockWeights& w,
                            bool per_frame_stats = false);

// Pre-norm MLP (expansion 4, GELU), residual added; applied to every token
// and to cls.
void feed_forward(TokenGrid& grid, const BlockWeights& w);

}  // namespace vta
