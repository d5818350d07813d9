#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vta/aggregation.hpp"
#include "vta/attention.hpp"
#include "vta/token_grid.hpp"
#include "vta/tokenization.hpp"
#include "vta/trajectory.hpp"
#include "vta/video.hpp"

namespace vta {

struct EncoderConfig {
    int frames = 0;      // T
    int height = 0;      // pixels
    int width = 0;       // pixels
    int patch = 16;      // P
    int dim = 0;         // D
    int heads = 1;
    int blocks = 1;      // M
    int reduce_t = 0;    // R_T, frames removed per block
    int reduce_s = 0;    // R_S, patches removed per block
    Strategy strategy = Strategy::geometry;
    MergeWeighting weighting = MergeWeighting::sized;
    SpatialPlanMode spatial_plan = SpatialPlanMode::shared;
    uint32_t seed = 0;
    bool clamp = false;

    int patches_per_frame() const {
        if (patch <= 0 || height % patch != 0 || width % patch != 0) return 0;
        return (height / patch) * (width / patch);
    }

    // All invariant violations, one message per field problem; empty = valid.
    std::vector<std::string> validate() const;
};

// Per-block token counts and effective reductions under the clamping policy:
// a dimension never drops below 1, and in geometry mode a block can remove
// at most floor(N/2) tokens.
struct ScheduleEntry {
    int t_in = 0, l_in = 0;
    int rt_eff = 0, rs_eff = 0;
    int t_out = 0, l_out = 0;
};

std::vector<ScheduleEntry> predicted_schedule(const EncoderConfig& cfg);

struct EncoderWeights {
    EmbeddingWeights embedding;
    std::vector<BlockWeights> blocks;

    static EncoderWeights seeded(const EncoderConfig& cfg);
    // Embedding as configured, every block transform zeroed (identity paths);
    // isolates the merge arithmetic for testing.
    static EncoderWeights seeded_identity_blocks(const EncoderConfig& cfg);

    void save(const std::string& path) const;
    static EncoderWeights load(const std::string& path, const EncoderConfig& cfg);
};

struct EncodedVideo {
    TokenGrid grid;
    std::vector<float> cls;
    Trajectory trajectory;
};

// Captured attention statistics, one pair per block, for replay tests.
struct BlockStats {
    AttnStats temporal;
    AttnStats spatial;
};

struct EncodeOptions {
    // Replace merging with the importance-score pruning baseline.
    bool prune_baseline = false;
    // When set, per-block AttnStats are appended here.
    std::vector<BlockStats>* stats_out = nullptr;
};

// Block order: temporal attention -> temporal aggregation -> spatial
// attention -> spatial aggregation -> feed-forward, repeated cfg.blocks
// times. Throws std::invalid_argument on an invalid config or a video that
// does not match it.
EncodedVideo encode(const RawVideo& video, const EncoderConfig& cfg, const EncoderWeights& w,
                    const EncodeOptions& opts = {});

}  // namespace vta
