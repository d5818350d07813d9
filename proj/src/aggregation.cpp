#include "vta/aggregation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "vta/kernels.hpp"

namespace vta {

namespace {

// Pairs sorted by src; new_index built from the kept set in original order.
MergePlan finalize_plan(int n, std::vector<std::pair<int, int>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    MergePlan plan;
    plan.n_before = n;
    plan.pairs = std::move(pairs);
    std::vector<bool> is_src(n, false);
    for (const auto& [src, dst] : plan.pairs) is_src[src] = true;
    plan.new_index.assign(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i)
        if (!is_src[i]) plan.new_index[i] = next++;
    for (const auto& [src, dst] : plan.pairs) plan.new_index[src] = plan.new_index[dst];
    return plan;
}

// For each a in set_a, its most similar b (ties: lower b). sim is the
// full A x B cosine matrix with rows in set_a order.
std::vector<MatchCandidate> best_matches(const Matrix& keys, std::span<const int> set_a,
                                         std::span<const int> set_b) {
    Matrix a_keys(static_cast<int>(set_a.size()), keys.cols);
    Matrix b_keys(static_cast<int>(set_b.size()), keys.cols);
    for (size_t i = 0; i < set_a.size(); ++i)
        std::copy(keys.row(set_a[i]), keys.row(set_a[i]) + keys.cols, a_keys.row(static_cast<int>(i)));
    for (size_t j = 0; j < set_b.size(); ++j)
        std::copy(keys.row(set_b[j]), keys.row(set_b[j]) + keys.cols, b_keys.row(static_cast<int>(j)));
    const Matrix sim = cosine_sim_matrix(a_keys, b_keys);

    std::vector<MatchCandidate> out(set_a.size());
    for (size_t i = 0; i < set_a.size(); ++i) {
        const float* row = sim.row(static_cast<int>(i));
        int best = 0;
        for (size_t j = 1; j < set_b.size(); ++j)
            if (row[j] > row[best]) best = static_cast<int>(j);
        out[i] = {set_a[i], set_b[best], row[best], false};
    }
    return out;
}

void check_plan(const TokenGrid& grid, const MergePlan& plan, int n_current, const char* who) {
    if (plan.n_before != n_current)
        throw std::invalid_argument(std::string(who) + ": stale plan (built for " +
                                    std::to_string(plan.n_before) + " tokens, grid has " +
                                    std::to_string(n_current) + ")");
    for (const auto& [src, dst] : plan.pairs)
        if (src < 0 || src >= n_current || dst < 0 || dst >= n_current)
            throw std::invalid_argument(std::string(who) + ": plan index out of range");
    (void)grid;
}

// dst slot -> list of src original indices merging into it, in pair order.
std::vector<std::vector<int>> group_sources(const MergePlan& plan) {
    std::vector<std::vector<int>> srcs(plan.n_before);
    for (const auto& [src, dst] : plan.pairs) srcs[dst].push_back(src);
    return srcs;
}

// Combine rows {dst, srcs...} of width dim. sized: one weighted mean over
// the whole group; pairwise: fold (acc+src)/2 in pair order.
void merge_feature(const float* const* rows, const float* weights, int n, int dim,
                   MergeWeighting weighting, float* out) {
    if (weighting == MergeWeighting::sized) {
        weighted_mean_rows(rows, weights, n, dim, out);
        return;
    }
    std::vector<double> acc(dim);
    for (int d = 0; d < dim; ++d) acc[d] = rows[0][d];
    for (int i = 1; i < n; ++i)
        for (int d = 0; d < dim; ++d) acc[d] = 0.5 * (acc[d] + rows[i][d]);
    for (int d = 0; d < dim; ++d) out[d] = static_cast<float>(acc[d]);
}

void apply_spatial_one_frame(TokenGrid& grid, TokenGrid& out, const MergePlan& plan, int t,
                             MergeWeighting weighting,
                             const std::vector<std::vector<int>>& srcs_of,
                             const std::vector<bool>& is_src) {
    for (int l = 0; l < plan.n_before; ++l) {
        if (is_src[l]) continue;  // sources fold into their destination below
        const int nl = plan.new_index[l];
        const auto& srcs = srcs_of[l];
        if (srcs.empty()) {
            std::copy(grid.feat(t, l), grid.feat(t, l) + grid.dim, out.feat(t, nl));
            out.size_of(t, nl) = grid.size_of(t, l);
            continue;
        }
        std::vector<const float*> rows;
        std::vector<float> weights;
        rows.push_back(grid.feat(t, l));
        weights.push_back(grid.size_of(t, l));
        float total = grid.size_of(t, l);
        for (int s : srcs) {
            rows.push_back(grid.feat(t, s));
            weights.push_back(grid.size_of(t, s));
            total += grid.size_of(t, s);
        }
        merge_feature(rows.data(), weights.data(), static_cast<int>(rows.size()), grid.dim,
                      weighting, out.feat(t, nl));
        out.size_of(t, nl) = total;
    }
}

}  // namespace

std::vector<float> importance_scores(const Matrix& attn) {
    if (attn.rows != attn.cols)
        throw std::invalid_argument("importance_scores: attention matrix must be square, got " +
                                    shape_str(attn));
    const int n = attn.rows;
    std::vector<float> scores(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) s += attn.at(j, i);
        scores[i] = static_cast<float>(s);
    }
    return scores;
}

MatchResult plan_importance(const Matrix& keys, std::span<const float> scores, int reduce) {
    const int n = keys.rows;
    if (static_cast<int>(scores.size()) != n)
        throw std::invalid_argument("plan_importance: scores length != key count");
    if (reduce < 1 || reduce > n - 1)
        throw std::invalid_argument("plan_importance: R must satisfy 1 <= R <= N-1, got R=" +
                                    std::to_string(reduce) + " N=" + std::to_string(n));

    // R smallest scores; stable sort keeps lower index first on ties.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] < scores[b]; });
    std::vector<int> set_a(order.begin(), order.begin() + reduce);
    std::sort(set_a.begin(), set_a.end());
    std::vector<bool> in_a(n, false);
    for (int a : set_a) in_a[a] = true;
    std::vector<int> set_b;
    for (int i = 0; i < n; ++i)
        if (!in_a[i]) set_b.push_back(i);

    MatchResult res;
    res.candidates = best_matches(keys, set_a, set_b);
    std::vector<std::pair<int, int>> pairs;
    for (auto& c : res.candidates) {
        c.merged = true;  // importance mode merges every selected token
        pairs.emplace_back(c.src, c.dst);
    }
    res.plan = finalize_plan(n, std::move(pairs));
    return res;
}

MatchResult plan_geometry(const Matrix& keys, int reduce) {
    const int n = keys.rows;
    if (reduce < 1 || reduce > n / 2)
        throw std::invalid_argument("plan_geometry: R must satisfy 1 <= R <= floor(N/2), got R=" +
                                    std::to_string(reduce) + " N=" + std::to_string(n));
    std::vector<int> set_a, set_b;
    for (int i = 0; i < n; ++i) (i % 2 == 0 ? set_a : set_b).push_back(i);

    MatchResult res;
    res.candidates = best_matches(keys, set_a, set_b);

    // Top-R by similarity; ties go to the lower a index. Candidate order is
    // already a-ascending, so a stable sort by descending sim suffices.
    std::vector<int> sel(res.candidates.size());
    std::iota(sel.begin(), sel.end(), 0);
    std::stable_sort(sel.begin(), sel.end(), [&](int x, int y) {
        return res.candidates[x].sim > res.candidates[y].sim;
    });
    std::vector<std::pair<int, int>> pairs;
    for (int r = 0; r < reduce; ++r) {
        auto& c = res.candidates[sel[r]];
        c.merged = true;
        pairs.emplace_back(c.src, c.dst);
    }
    res.plan = finalize_plan(n, std::move(pairs));
    return res;
}

void apply_spatial(TokenGrid& grid, const MergePlan& plan, MergeWeighting weighting) {
    check_plan(grid, plan, grid.patches, "apply_spatial");
    const auto srcs_of = group_sources(plan);
    std::vector<bool> is_src(plan.n_before, false);
    for (const auto& [src, dst] : plan.pairs) is_src[src] = true;
    TokenGrid out(grid.frames, plan.n_after(), grid.dim);
    out.frame_size = grid.frame_size;
    out.cls = grid.cls;
#pragma omp parallel for schedule(static)
    for (int t = 0; t < grid.frames; ++t)
        apply_spatial_one_frame(grid, out, plan, t, weighting, srcs_of, is_src);
    grid = std::move(out);
}

void apply_spatial_per_frame(TokenGrid& grid, std::span<const MergePlan> plans,
                             MergeWeighting weighting) {
    if (static_cast<int>(plans.size()) != grid.frames)
        throw std::invalid_argument("apply_spatial_per_frame: need one plan per frame");
    const int removed = static_cast<int>(plans[0].pairs.size());
    for (const auto& p : plans) {
        check_plan(grid, p, grid.patches, "apply_spatial_per_frame");
        if (static_cast<int>(p.pairs.size()) != removed)
            throw std::invalid_argument(
                "apply_spatial_per_frame: plans remove different patch counts");
    }
    TokenGrid out(grid.frames, grid.patches - removed, grid.dim);
    out.frame_size = grid.frame_size;
    out.cls = grid.cls;
#pragma omp parallel for schedule(static)
    for (int t = 0; t < grid.frames; ++t) {
        const auto srcs_of = group_sources(plans[t]);
        std::vector<bool> is_src(plans[t].n_before, false);
        for (const auto& [src, dst] : plans[t].pairs) is_src[src] = true;
        apply_spatial_one_frame(grid, out, plans[t], t, weighting, srcs_of, is_src);
    }
    grid = std::move(out);
}

void apply_temporal(TokenGrid& grid, const MergePlan& plan, MergeWeighting weighting) {
    check_plan(grid, plan, grid.frames, "apply_temporal");
    const auto srcs_of = group_sources(plan);
    std::vector<bool> is_src(grid.frames, false);
    for (const auto& [src, dst] : plan.pairs) is_src[src] = true;

    TokenGrid out(plan.n_after(), grid.patches, grid.dim);
    out.cls = grid.cls;
    for (int t = 0; t < grid.frames; ++t) {
        if (is_src[t]) continue;
        const int nt = plan.new_index[t];
        const auto& srcs = srcs_of[t];
        double fs = grid.frame_size[t];
        for (int s : srcs) fs += grid.frame_size[s];
        out.frame_size[nt] = static_cast<float>(fs);
        if (srcs.empty()) {
            std::copy(grid.feat(t, 0), grid.feat(t, 0) + static_cast<size_t>(grid.patches) * grid.dim,
                      out.feat(nt, 0));
            for (int l = 0; l < grid.patches; ++l) out.size_of(nt, l) = grid.size_of(t, l);
            continue;
        }
#pragma omp parallel for schedule(static)
        for (int l = 0; l < grid.patches; ++l) {
            std::vector<const float*> rows;
            std::vector<float> weights;
            rows.push_back(grid.feat(t, l));
            weights.push_back(grid.size_of(t, l) * grid.frame_size[t]);
            double wsum = weights[0];
            for (int s : srcs) {
                rows.push_back(grid.feat(s, l));
                weights.push_back(grid.size_of(s, l) * grid.frame_size[s]);
                wsum += weights.back();
            }
            merge_feature(rows.data(), weights.data(), static_cast<int>(rows.size()), grid.dim,
                          weighting, out.feat(nt, l));
            // keep token_size * frame_size equal to the constituent count
            out.size_of(nt, l) = static_cast<float>(wsum / fs);
        }
    }
    grid = std::move(out);
}

void prune(TokenGrid& grid, std::span<const float> scores, int reduce, Dimension dimension) {
    const int n = dimension == Dimension::temporal ? grid.frames : grid.patches;
    if (static_cast<int>(scores.size()) != n)
        throw std::invalid_argument("prune: scores length mismatch");
    if (reduce < 0 || reduce > n - 1)
        throw std::invalid_argument("prune: R must satisfy 0 <= R <= N-1");
    if (reduce == 0) return;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] < scores[b]; });
    std::vector<bool> drop(n, false);
    for (int i = 0; i < reduce; ++i) drop[order[i]] = true;

    if (dimension == Dimension::temporal) {
        TokenGrid out(n - reduce, grid.patches, grid.dim);
        out.cls = grid.cls;
        int nt = 0;
        for (int t = 0; t < n; ++t) {
            if (drop[t]) continue;
            std::copy(grid.feat(t, 0), grid.feat(t, 0) + static_cast<size_t>(grid.patches) * grid.dim,
                      out.feat(nt, 0));
            for (int l = 0; l < grid.patches; ++l) out.size_of(nt, l) = grid.size_of(t, l);
            out.frame_size[nt] = grid.frame_size[t];
            ++nt;
        }
        grid = std::move(out);
    } else {
        TokenGrid out(grid.frames, n - reduce, grid.dim);
        out.cls = grid.cls;
        out.frame_size = grid.frame_size;
        for (int t = 0; t < grid.frames; ++t) {
            int nl = 0;
            for (int l = 0; l < n; ++l) {
                if (drop[l]) continue;
                std::copy(grid.feat(t, l), grid.feat(t, l) + grid.dim, out.feat(t, nl));
                out.size_of(t, nl) = grid.size_of(t, l);
                ++nl;
            }
        }
        grid = std::move(out);
    }
}

}  // namespace vta
