#pragma once

#include <span>
#include <utility>
#include <vector>

#include "vta/matrix.hpp"
#include "vta/token_grid.hpp"

namespace vta {

enum class Strategy { importance, geometry };
enum class MergeWeighting { sized, pairwise };
enum class SpatialPlanMode { shared, per_frame };
enum class Dimension { temporal, spatial };

// One aggregation step: R (src -> dst) pairs in original token indices,
// pairs sorted by src ascending. Src indices are distinct and never appear
// as destinations; a destination may receive several sources. new_index maps
// every original index to its slot in the output order (original order with
// merged sources removed); sources map to their destination's slot.
struct MergePlan {
    int n_before = 0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> new_index;

    int n_after() const { return n_before - static_cast<int>(pairs.size()); }
};

// A candidate (a in set A) -> (best b in set B) match with its similarity;
// merged marks the top-R selection. Kept for the similarity probe.
struct MatchCandidate {
    int src = 0;
    int dst = 0;
    float sim = 0.0f;
    bool merged = false;
};

struct MatchResult {
    MergePlan plan;
    std::vector<MatchCandidate> candidates;
};

// Eq-style importance: S_i = sum over j != i of attn[j][i] (the attention
// token i receives from the others). Throws on non-square input.
std::vector<float> importance_scores(const Matrix& attn);

// Importance-based aggregation: A = the R lowest-score tokens (ties: lower
// index), B = the rest; each a pairs with its most cosine-similar b (ties:
// lower index); all R pairs merge. Requires 1 <= R <= N-1.
MatchResult plan_importance(const Matrix& keys, std::span<const float> scores, int reduce);

// Geometry-based aggregation: A = even-indexed, B = odd-indexed tokens; each
// a pairs with its most similar b; the R most similar pairs merge (ties:
// lower a index). Requires 1 <= R <= floor(N/2).
MatchResult plan_geometry(const Matrix& keys, int reduce);

// Merge patches. The same plan is applied to every frame: dst feature
// becomes the token_size-weighted mean of {dst, srcs} (or the running
// pairwise mean), dst token_size the sum.
void apply_spatial(TokenGrid& grid, const MergePlan& plan,
                   MergeWeighting weighting = MergeWeighting::sized);

// Per-frame variant: plans[t] applies to frame t; every plan must remove the
// same number of patches.
void apply_spatial_per_frame(TokenGrid& grid, std::span<const MergePlan> plans,
                             MergeWeighting weighting = MergeWeighting::sized);

// Merge frames: frame src merges into frame dst position by position,
// weighted by token_size * frame_size; dst frame_size becomes the sum.
void apply_temporal(TokenGrid& grid, const MergePlan& plan,
                    MergeWeighting weighting = MergeWeighting::sized);

// Pruning baseline: drop (not merge) the R lowest-score frames or patch
// positions; survivor sizes unchanged, so constituent mass shrinks.
void prune(TokenGrid& grid, std::span<const float> scores, int reduce, Dimension dimension);

// Exhaustive small-N reference matcher (N <= 12): for the given set A it
// recomputes every a -> best-b candidate by brute force and selects the
// top-R with the same tie rules as the planners. Implemented independently
// of plan_importance / plan_geometry (see oracle.cpp).
MergePlan oracle_best_pairs(const Matrix& keys, std::span<const int> set_a, int reduce);

}  // namespace vta
