#include "vta/tokenization.hpp"

#include <stdexcept>

#include "vta/kernels.hpp"
#include "vta/rng.hpp"

namespace vta {

PatchTensor patchify(const RawVideo& video, int patch_size) {
    if (patch_size <= 0) throw std::invalid_argument("patchify: patch size must be > 0");
    if (video.height % patch_size != 0 || video.width % patch_size != 0)
        throw std::invalid_argument("patchify: frame size " + std::to_string(video.height) + "x" +
                                    std::to_string(video.width) + " not divisible by patch size " +
                                    std::to_string(patch_size));
    const int tiles_y = video.height / patch_size;
    const int tiles_x = video.width / patch_size;
    PatchTensor out;
    out.frames = video.frames;
    out.patches = tiles_y * tiles_x;
    out.patch_dim = 3 * patch_size * patch_size;
    out.values = Matrix(out.frames * out.patches, out.patch_dim);

#pragma omp parallel for schedule(static)
    for (int t = 0; t < video.frames; ++t) {
        for (int l = 0; l < out.patches; ++l) {
            const int ty = l / tiles_x;
            const int tx = l % tiles_x;
            float* row = out.values.row(t * out.patches + l);
            int idx = 0;
            for (int py = 0; py < patch_size; ++py)
                for (int px = 0; px < patch_size; ++px)
                    for (int c = 0; c < 3; ++c)
                        row[idx++] =
                            video.at(t, ty * patch_size + py, tx * patch_size + px, c);
        }
    }
    return out;
}

RawVideo unpatchify(const PatchTensor& patches, int height, int width, int patch_size) {
    const int tiles_y = height / patch_size;
    const int tiles_x = width / patch_size;
    if (tiles_y * tiles_x != patches.patches || 3 * patch_size * patch_size != patches.patch_dim)
        throw std::invalid_argument("unpatchify: shape mismatch");
    RawVideo v(patches.frames, height, width);
    for (int t = 0; t < patches.frames; ++t) {
        for (int l = 0; l < patches.patches; ++l) {
            const int ty = l / tiles_x;
            const int tx = l % tiles_x;
            const float* row = patches.values.row(t * patches.patches + l);
            int idx = 0;
            for (int py = 0; py < patch_size; ++py)
                for (int px = 0; px < patch_size; ++px)
                    for (int c = 0; c < 3; ++c)
                        v.at(t, ty * patch_size + py, tx * patch_size + px, c) = row[idx++];
        }
    }
    return v;
}

EmbeddingWeights EmbeddingWeights::seeded(int patch_dim, int dim, int patches, int max_frames,
                                          uint32_t seed) {
    std::mt19937 g(seed);
    EmbeddingWeights w;
    w.patch_dim = patch_dim;
    w.dim = dim;
    w.max_frames = max_frames;
    w.patch_proj = Matrix(patch_dim, dim);
    w.spatial_pos = Matrix(patches, dim);
    w.temporal_pos = Matrix(max_frames, dim);
    w.cls_seed.resize(dim);
    const float scale = 0.02f;
    for (float& v : w.patch_proj.data) v = scale * normal_float(g);
    for (float& v : w.spatial_pos.data) v = scale * normal_float(g);
    for (float& v : w.temporal_pos.data) v = scale * normal_float(g);
    for (float& v : w.cls_seed) v = scale * normal_float(g);
    return w;
}

TokenGrid embed(const PatchTensor& patches, const EmbeddingWeights& w) {
    if (patches.patch_dim != w.patch_dim)
        throw std::invalid_argument("embed: patch dim mismatch");
    if (w.spatial_pos.rows != patches.patches)
        throw std::invalid_argument("embed: spatial table has " +
                                    std::to_string(w.spatial_pos.rows) + " rows, video has " +
                                    std::to_string(patches.patches) + " patches per frame");
    if (patches.frames > w.max_frames)
        throw std::invalid_argument("embed: " + std::to_string(patches.frames) +
                                    " frames exceed temporal table length " +
                                    std::to_string(w.max_frames));

    const Matrix projected = matmul(patches.values, w.patch_proj);  // (T*L) x D
    TokenGrid grid(patches.frames, patches.patches, w.dim);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < grid.frames; ++t) {
        for (int l = 0; l < grid.patches; ++l) {
            const float* p = projected.row(t * grid.patches + l);
            const float* sp = w.spatial_pos.row(l);
            const float* tp = w.temporal_pos.row(t);
            float* f = grid.feat(t, l);
            for (int d = 0; d < grid.dim; ++d) f[d] = p[d] + sp[d] + tp[d];
        }
    }
    grid.cls = w.cls_seed;
    return grid;
}

Matrix frame_tokens(const TokenGrid& grid) {
    Matrix out(grid.frames, grid.dim);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < grid.frames; ++t) {
        std::vector<const float*> rows(grid.patches);
        std::vector<float> weights(grid.patches);
        for (int l = 0; l < grid.patches; ++l) {
            rows[l] = grid.feat(t, l);
            weights[l] = grid.size_of(t, l);
        }
        weighted_mean_rows(rows.data(), weights.data(), grid.patches, grid.dim, out.row(t));
    }
    return out;
}

}  // namespace vta
