#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vta/trajectory.hpp"
#include "vta/video.hpp"

namespace vta {

// Planted redundancy structure: frames partition into temporal segments,
// patch tiles into spatial regions; every (segment, region) cluster gets a
// base color, and pixels add bounded uniform noise.
struct PlantedSpec {
    std::vector<int> frame_segment;            // per frame -> segment id, 0-based contiguous
    std::vector<int> tile_region;              // per tile (raster order) -> region id
    int tiles_x = 0, tiles_y = 0;
    std::vector<std::array<float, 3>> colors;  // per cluster: segment * num_regions + region
    float noise = 0.0f;                        // amplitude, uniform in [-noise, noise]

    int num_segments() const;
    int num_regions() const;
    int cluster_of(int frame, int tile) const {
        return frame_segment[frame] * num_regions() + tile_region[tile];
    }
};

// Contiguous equal-length segments, block-grid regions, seeded colors.
PlantedSpec make_planted_spec(int frames, int segments, int tiles_x, int tiles_y, int regions_x,
                              int regions_y, float noise, uint32_t seed);

// pixel(t, y, x, c) = color[cluster(segment(t), region(tile(y,x)))][c]
//                     + uniform(-noise, noise), clamped to [0, 1].
// Noise comes from a counter-based hash of (seed, t, y, x, c): deterministic
// and independent of evaluation order.
RawVideo generate(const PlantedSpec& spec, int height, int width, uint32_t seed);

// Fraction of original cells whose group stays inside one ground-truth
// cluster, weighted by group size: sum over groups of the majority-cluster
// count, divided by T*L. 1.0 iff every merge was within-cluster.
double score_purity(const GroupMap& groups, const PlantedSpec& truth);

// Text sidecar with the ground-truth partitions.
void write_truth(const PlantedSpec& spec, const std::string& path);
PlantedSpec read_truth(const std::string& path);

}  // namespace vta
