#pragma once

#include <string>
#include <vector>

#include "vta/encoder.hpp"

namespace vta {

// One encode run: reads the video, encodes under cfg, and writes into
// out_dir:
//   encoded.tstw    features / token_size / frame_size / cls tensors
//   trajectory.txt  replayable merge record
//   summary.txt     key = value run summary (token counts per block, timing)
// On failure every file this call created is removed before the exception
// propagates.
struct EncodeJob {
    EncoderConfig config;
    std::string video_path;
    std::string out_dir;
    bool prune_baseline = false;
};

struct EncodeJobResult {
    int final_frames = 0;
    int final_patches = 0;
    long final_tokens = 0;
    double wall_ms = 0.0;
    double constituents = 0.0;  // sum of token_size * frame_size at the end
    std::string encoded_path;
    std::string trajectory_path;
    std::string summary_path;
};

EncodeJobResult run_encode_job(const EncodeJob& job);

// Renders masks and the group index from a completed run directory.
void run_visualize(const std::string& run_dir, const EncoderConfig& cfg, uint32_t palette_seed,
                   const std::string& out_dir);

}  // namespace vta
