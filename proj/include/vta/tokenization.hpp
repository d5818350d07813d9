#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vta/matrix.hpp"
#include "vta/token_grid.hpp"
#include "vta/video.hpp"

namespace vta {

// Flattened patches: one row per (frame, tile), raster order within a frame,
// each row the P*P tile flattened channel-last (3*P*P values).
struct PatchTensor {
    int frames = 0;
    int patches = 0;  // per frame, = H*W/P^2
    int patch_dim = 0;  // 3*P*P
    Matrix values;      // (frames*patches) x patch_dim
};

PatchTensor patchify(const RawVideo& video, int patch_size);

// Inverse of patchify; exact on every pixel.
RawVideo unpatchify(const PatchTensor& patches, int height, int width, int patch_size);

struct EmbeddingWeights {
    int patch_dim = 0;   // 3*P*P
    int dim = 0;         // D
    int max_frames = 0;  // temporal table length
    Matrix patch_proj;    // patch_dim x D
    Matrix spatial_pos;   // L x D
    Matrix temporal_pos;  // max_frames x D
    std::vector<float> cls_seed;  // D

    static EmbeddingWeights seeded(int patch_dim, int dim, int patches, int max_frames,
                                   uint32_t seed);
};

// features[t][l] = patch(t,l) . patch_proj + spatial_pos[l] + temporal_pos[t];
// all sizes start at 1, cls from cls_seed. Throws if frames > max_frames or
// shapes disagree.
TokenGrid embed(const PatchTensor& patches, const EmbeddingWeights& w);

// Frame pseudo tokens: row t is the token_size-weighted mean of frame t's
// patch features. Stays the mean over the frame's original patches after
// spatial merging.
Matrix frame_tokens(const TokenGrid& grid);

}  // namespace vta
