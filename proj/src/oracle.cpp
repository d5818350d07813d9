// Exhaustive reference matcher for small N. Kept deliberately free of the
// production matching code: similarity, argmax, and top-R selection are all
// recomputed here from scratch so plan_importance / plan_geometry can be
// checked against it.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vta/aggregation.hpp"

namespace vta {

namespace {

double cosine(const Matrix& keys, int i, int j) {
    double dot = 0.0, ni = 0.0, nj = 0.0;
    for (int d = 0; d < keys.cols; ++d) {
        const double a = keys.at(i, d);
        const double b = keys.at(j, d);
        dot += a * b;
        ni += a * a;
        nj += b * b;
    }
    const double denom = std::sqrt(ni) * std::sqrt(nj);
    if (denom == 0.0) return 0.0;
    // match the float rounding of the production kernel
    return static_cast<float>(dot / denom);
}

}  // namespace

MergePlan oracle_best_pairs(const Matrix& keys, std::span<const int> set_a, int reduce) {
    const int n = keys.rows;
    if (n > 12) throw std::invalid_argument("oracle_best_pairs: refusing N > 12");
    if (reduce < 0 || reduce > static_cast<int>(set_a.size()))
        throw std::invalid_argument("oracle_best_pairs: R out of range");

    std::vector<bool> in_a(n, false);
    for (int a : set_a) {
        if (a < 0 || a >= n) throw std::invalid_argument("oracle_best_pairs: bad set A index");
        in_a[a] = true;
    }

    struct Cand {
        int a, b;
        double sim;
    };
    std::vector<Cand> cands;
    std::vector<int> a_sorted(set_a.begin(), set_a.end());
    std::sort(a_sorted.begin(), a_sorted.end());
    for (int a : a_sorted) {
        int best_b = -1;
        double best_sim = 0.0;
        for (int b = 0; b < n; ++b) {
            if (in_a[b]) continue;
            const double s = cosine(keys, a, b);
            if (best_b < 0 || s > best_sim) {  // strict >: lower b wins ties
                best_b = b;
                best_sim = s;
            }
        }
        if (best_b < 0) throw std::invalid_argument("oracle_best_pairs: set B is empty");
        cands.push_back({a, best_b, best_sim});
    }

    // top-R by similarity, ties to the lower a index
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& x, const Cand& y) { return x.sim > y.sim; });

    std::vector<std::pair<int, int>> pairs;
    for (int r = 0; r < reduce; ++r) pairs.emplace_back(cands[r].a, cands[r].b);
    std::sort(pairs.begin(), pairs.end());

    MergePlan plan;
    plan.n_before = n;
    plan.pairs = pairs;
    std::vector<bool> merged(n, false);
    for (const auto& [src, dst] : pairs) merged[src] = true;
    plan.new_index.assign(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i)
        if (!merged[i]) plan.new_index[i] = next++;
    for (const auto& [src, dst] : pairs) plan.new_index[src] = plan.new_index[dst];
    return plan;
}

}  // namespace vta
