#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vta/encoder.hpp"

namespace vta {

// One fused multiply-add counts as 2 operations; softmax and normalization
// are excluded (sub-percent at these shapes).
struct BlockFlops {
    int t = 0, l = 0;  // token counts the block ran at
    uint64_t temporal_qkv = 0;     // Q/K/V/out projections of the temporal sublayer
    uint64_t temporal_scores = 0;  // QK^T
    uint64_t temporal_values = 0;  // attention x V
    uint64_t spatial_qkv = 0;
    uint64_t spatial_scores = 0;
    uint64_t spatial_values = 0;
    uint64_t ffn = 0;
    uint64_t similarity_overhead = 0;  // key cosine matrices for aggregation

    uint64_t total() const {
        return temporal_qkv + temporal_scores + temporal_values + spatial_qkv + spatial_scores +
               spatial_values + ffn + similarity_overhead;
    }
};

struct FlopReport {
    std::vector<BlockFlops> blocks;  // one per encoder block
    BlockFlops totals;               // element-wise sums (t/l unused)
    uint64_t total = 0;

    double gflops() const { return static_cast<double>(total) * 1e-9; }
    uint64_t attention_scores_values() const {
        return totals.temporal_scores + totals.temporal_values + totals.spatial_scores +
               totals.spatial_values;
    }
};

// Divided space-time attention under the config's token schedule. Per block
// at (T_i, L_i): temporal scores+values 4*L*T^2*D, spatial 4*T*L^2*D,
// 8*T*L*D^2 projections per attention sublayer, 16*T*L*D^2 FFN, plus
// T^2*D / L^2*D similarity overhead for each active aggregation dimension.
FlopReport flops_divided(const EncoderConfig& cfg);

// Joint space-time comparator: one attention sublayer over N = T_i * L_i
// tokens per block (scores+values 4*N^2*D), projections and FFN as above.
FlopReport flops_joint(const EncoderConfig& cfg);

struct SweepPoint {
    int rt = 0, rs = 0;
    FlopReport report;
};

std::vector<SweepPoint> sweep(const EncoderConfig& cfg, std::span<const int> rt_values,
                              std::span<const int> rs_values);

// CSV: config columns, breakdown columns, total. First line is the header.
std::string sweep_csv(const EncoderConfig& cfg, const std::vector<SweepPoint>& points);
std::string flops_csv_header();

}  // namespace vta
