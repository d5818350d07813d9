#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vta/aggregation.hpp"

namespace vta {

// Everything one block's aggregation did: the plans (replayable) and the
// full candidate lists with similarities (for the probe).
struct BlockTrace {
    int t_in = 0, l_in = 0;    // grid shape entering the block
    int t_out = 0, l_out = 0;  // shape leaving it
    MergePlan temporal_plan;                        // empty pairs = skipped
    std::vector<MatchCandidate> temporal_candidates;
    std::vector<MergePlan> spatial_plans;           // 1 entry (shared) or one per frame
    std::vector<MatchCandidate> spatial_candidates;
};

struct Trajectory {
    int frames = 0;   // original T
    int patches = 0;  // original L
    SpatialPlanMode spatial_mode = SpatialPlanMode::shared;
    std::vector<BlockTrace> blocks;
};

// Replayed merge structure: which original cells each final token holds.
struct GroupMap {
    int frames = 0, patches = 0;              // original T, L
    int final_frames = 0, final_patches = 0;
    // final frame t' -> sorted original frame ids
    std::vector<std::vector<int>> frame_groups;
    // final token t'*final_patches+l' -> sorted original (t, l) cells
    std::vector<std::vector<std::pair<int, int>>> groups;

    const std::vector<std::pair<int, int>>& group(int t, int l) const {
        return groups[static_cast<size_t>(t) * final_patches + l];
    }
};

// Deterministic replay of all plans over index sets. Throws
// std::runtime_error if the trajectory is internally inconsistent.
GroupMap recover_groups(const Trajectory& traj, int frames, int patches);

// One binary PPM (P6, 8-bit RGB) per final frame group, named
// mask_<t'>.ppm: every original patch tile is filled with a color drawn from
// a seeded hash of its spatial group, so merged tiles share a color. A
// frame_groups.txt sidecar lists the original frames behind each image.
void render_masks(const GroupMap& groups, int height, int width, int patch_size, uint32_t seed,
                  const std::string& out_dir);

// One line per final token: "t' l' : (t,l) (t,l) ...".
void write_group_index(const GroupMap& groups, const std::string& path);

// Per-block similarity statistics of matched A-B pairs, split by merge
// outcome and token kind.
struct ProbeRow {
    int block = 0;            // 1-based
    Dimension dimension = Dimension::temporal;
    int candidates = 0;
    int merged = 0;
    double mean_sim_merged = 0.0;    // NaN when no merged pairs
    double mean_sim_unmerged = 0.0;  // NaN when no unmerged pairs
};

std::vector<ProbeRow> similarity_probe(const Trajectory& traj);
std::string probe_csv(const std::vector<ProbeRow>& rows);

// Text serialization (deterministic given identical runs).
void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

}  // namespace vta
