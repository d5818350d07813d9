#include <cmath>
#include <numeric>

#include "doctest.h"
#include "test_helpers.hpp"
#include "vta/aggregation.hpp"

using namespace vta;

namespace {

bool plans_equal(const MergePlan& a, const MergePlan& b) {
    return a.n_before == b.n_before && a.pairs == b.pairs && a.new_index == b.new_index;
}

std::vector<int> even_indices(int n) {
    std::vector<int> out;
    for (int i = 0; i < n; i += 2) out.push_back(i);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("aggregation");

TEST_CASE("importance scores: hand-evaluated 2x2 case") {
    const Matrix attn(2, 2, {0.9f, 0.1f, 0.4f, 0.6f});
    const auto s = importance_scores(attn);
    CHECK(s[0] == doctest::Approx(0.4));
    CHECK(s[1] == doctest::Approx(0.1));
}

TEST_CASE("importance scores: uniform attention") {
    const int n = 5;
    Matrix attn(n, n);
    for (auto& v : attn.data) v = 1.0f / n;
    for (float s : importance_scores(attn))
        CHECK(s == doctest::Approx((n - 1.0) / n).epsilon(1e-6));
}

TEST_CASE("importance scores: sum identity over random stochastic matrices") {
    for (uint32_t seed = 0; seed < 100; ++seed) {
        const int n = 3 + static_cast<int>(seed % 6);
        const Matrix attn = random_row_stochastic(n, seed);
        const auto s = importance_scores(attn);
        double sum_s = 0.0, trace = 0.0;
        for (float v : s) sum_s += v;
        for (int i = 0; i < n; ++i) trace += attn.at(i, i);
        CHECK(std::abs(sum_s - (n - trace)) < 1e-5);
    }
}

TEST_CASE("importance scores reject non-square input") {
    CHECK_THROWS_AS(importance_scores(Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("plan_importance continues the Eq-style example") {
    const Matrix keys(2, 2, {1.0f, 0.0f, 0.8f, 0.2f});
    const std::vector<float> scores = {0.4f, 0.1f};
    const MatchResult r = plan_importance(keys, scores, 1);
    REQUIRE(r.plan.pairs.size() == 1);
    CHECK(r.plan.pairs[0] == std::pair<int, int>{1, 0});
    CHECK(r.plan.new_index[0] == 0);
    CHECK(r.plan.new_index[1] == 0);  // merged into the survivor
}

TEST_CASE("plan_importance boundary R = N-1 merges everything into one survivor") {
    const Matrix keys = random_matrix(6, 4, 5);
    std::vector<float> scores = {0.5f, 0.1f, 0.2f, 0.3f, 0.9f, 0.4f};
    const MatchResult r = plan_importance(keys, scores, 5);
    CHECK(r.plan.pairs.size() == 5);
    CHECK(r.plan.n_after() == 1);
    for (const auto& [src, dst] : r.plan.pairs) CHECK(dst == 4);  // only token 4 survives
}

TEST_CASE("plan_importance rejects out-of-range R") {
    const Matrix keys = random_matrix(4, 3, 7);
    const std::vector<float> scores = {1, 2, 3, 4};
    CHECK_THROWS_AS(plan_importance(keys, scores, 0), std::invalid_argument);
    CHECK_THROWS_AS(plan_importance(keys, scores, 4), std::invalid_argument);
}

TEST_CASE("plan_geometry: duplicate-key example with tie-breaking") {
    const Matrix keys(4, 2, {1, 0, 1, 0, 0, 1, 0, 1});  // k0=k1, k2=k3
    const MatchResult r1 = plan_geometry(keys, 1);
    REQUIRE(r1.plan.pairs.size() == 1);
    CHECK(r1.plan.pairs[0] == std::pair<int, int>{0, 1});  // sim tie, lower A index wins

    const MatchResult r2 = plan_geometry(keys, 2);
    CHECK(r2.plan.pairs.size() == 2);
    CHECK(r2.plan.n_after() == 2);
    CHECK(r2.plan.pairs[0] == std::pair<int, int>{0, 1});
    CHECK(r2.plan.pairs[1] == std::pair<int, int>{2, 3});
}

TEST_CASE("plan_geometry: identical keys merge every even token") {
    Matrix keys(7, 3);
    for (auto& v : keys.data) v = 0.5f;
    const MatchResult r = plan_geometry(keys, 3);  // floor(7/2)
    CHECK(r.plan.pairs.size() == 3);
    for (const auto& [src, dst] : r.plan.pairs) {
        CHECK(src % 2 == 0);
        CHECK(dst % 2 == 1);
    }
    CHECK_THROWS_AS(plan_geometry(keys, 4), std::invalid_argument);
}

TEST_CASE("planners match the exhaustive oracle on random instances") {
    for (uint32_t seed = 0; seed < 100; ++seed) {
        std::mt19937 g(seed);
        const int n = 4 + static_cast<int>(g() % 7);  // 4..10
        const Matrix keys = random_matrix(n, 5, seed + 900);

        const int r_geo = 1 + static_cast<int>(g() % (n / 2));
        const MatchResult geo = plan_geometry(keys, r_geo);
        const MergePlan oracle_geo = oracle_best_pairs(keys, even_indices(n), r_geo);
        CHECK(plans_equal(geo.plan, oracle_geo));

        std::vector<float> scores(n);
        for (auto& s : scores) s = uniform_range(g, 0.0f, 1.0f);
        const int r_imp = 1 + static_cast<int>(g() % (n - 1));
        const MatchResult imp = plan_importance(keys, scores, r_imp);
        std::vector<int> set_a;
        for (const auto& c : imp.candidates) set_a.push_back(c.src);
        const MergePlan oracle_imp = oracle_best_pairs(keys, set_a, r_imp);
        CHECK(plans_equal(imp.plan, oracle_imp));
    }
}

TEST_CASE("oracle handles the singleton case and refuses large N") {
    const Matrix keys = random_matrix(2, 3, 1);
    const std::vector<int> set_a = {0};
    const MergePlan p = oracle_best_pairs(keys, set_a, 1);
    REQUIRE(p.pairs.size() == 1);
    CHECK(p.pairs[0] == std::pair<int, int>{0, 1});
    CHECK_THROWS_AS(oracle_best_pairs(random_matrix(13, 2, 2), set_a, 1), std::invalid_argument);
}

TEST_CASE("apply_spatial merges features and sizes") {
    TokenGrid grid(1, 2, 1);
    grid.feat(0, 0)[0] = 2.0f;
    grid.feat(0, 1)[0] = 4.0f;
    grid.size_of(0, 1) = 3.0f;

    MergePlan plan;
    plan.n_before = 2;
    plan.pairs = {{0, 1}};
    plan.new_index = {0, 0};
    apply_spatial(grid, plan);
    CHECK(grid.patches == 1);
    CHECK(grid.feat(0, 0)[0] == doctest::Approx(3.5));  // (2*1 + 4*3) / 4
    CHECK(grid.size_of(0, 0) == 4.0f);
}

TEST_CASE("apply_spatial with identical patches is idempotent on features") {
    TokenGrid grid(2, 3, 4);
    std::mt19937 g(3);
    for (int t = 0; t < 2; ++t) {
        for (int d = 0; d < 4; ++d) {
            const float v = uniform_range(g, -1.0f, 1.0f);
            grid.feat(t, 0)[d] = v;
            grid.feat(t, 2)[d] = v;
            grid.feat(t, 1)[d] = uniform_range(g, -1.0f, 1.0f);
        }
    }
    MergePlan plan;
    plan.n_before = 3;
    plan.pairs = {{2, 0}};
    plan.new_index = {0, 1, 0};
    const TokenGrid before = grid;
    apply_spatial(grid, plan);
    for (int t = 0; t < 2; ++t) {
        for (int d = 0; d < 4; ++d)
            CHECK(grid.feat(t, 0)[d] == doctest::Approx(before.feat(t, 0)[d]).epsilon(1e-6));
        CHECK(grid.size_of(t, 0) == 2.0f);
    }
}

TEST_CASE("apply_spatial conserves constituent mass over random plans") {
    for (uint32_t seed = 0; seed < 20; ++seed) {
        std::mt19937 g(seed);
        TokenGrid grid(3, 8, 4);
        for (auto& f : grid.features) f = uniform_range(g, -1.0f, 1.0f);
        const double before = grid.constituent_count();

        const Matrix keys = random_matrix(8, 4, seed + 50);
        const MatchResult r = plan_geometry(keys, 1 + static_cast<int>(g() % 4));
        apply_spatial(grid, r.plan);
        CHECK(grid.constituent_count() == doctest::Approx(before).epsilon(1e-9));
        // every frame keeps the full patch mass
        for (int t = 0; t < grid.frames; ++t) {
            double row = 0.0;
            for (int l = 0; l < grid.patches; ++l) row += grid.size_of(t, l);
            CHECK(row == doctest::Approx(8.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("apply_spatial rejects a stale plan") {
    TokenGrid grid(1, 4, 2);
    MergePlan plan;
    plan.n_before = 6;  // built for a different width
    plan.pairs = {{0, 1}};
    plan.new_index = {0, 0, 1, 2, 3, 4};
    CHECK_THROWS_AS(apply_spatial(grid, plan), std::invalid_argument);
}

TEST_CASE("apply_temporal merges frames position by position") {
    TokenGrid grid(2, 2, 1);
    grid.feat(0, 0)[0] = 1.0f;  // p
    grid.feat(0, 1)[0] = 3.0f;  // q
    grid.feat(1, 0)[0] = 5.0f;  // r
    grid.feat(1, 1)[0] = 7.0f;  // s
    MergePlan plan;
    plan.n_before = 2;
    plan.pairs = {{0, 1}};
    plan.new_index = {0, 0};
    apply_temporal(grid, plan);
    CHECK(grid.frames == 1);
    CHECK(grid.feat(0, 0)[0] == doctest::Approx(3.0));  // (p+r)/2
    CHECK(grid.feat(0, 1)[0] == doctest::Approx(5.0));  // (q+s)/2
    CHECK(grid.frame_size[0] == 2.0f);
    CHECK(grid.size_of(0, 0) == 1.0f);  // per-position size unchanged
}

TEST_CASE("apply_temporal with identical frames leaves features unchanged") {
    TokenGrid grid(3, 2, 3);
    std::mt19937 g(17);
    for (int l = 0; l < 2; ++l)
        for (int d = 0; d < 3; ++d) {
            const float v = uniform_range(g, -1.0f, 1.0f);
            for (int t = 0; t < 3; ++t) grid.feat(t, l)[d] = v;
        }
    MergePlan plan;
    plan.n_before = 3;
    plan.pairs = {{0, 1}};
    plan.new_index = {0, 0, 1};
    const TokenGrid before = grid;
    apply_temporal(grid, plan);
    CHECK(grid.frames == 2);
    for (int l = 0; l < 2; ++l)
        for (int d = 0; d < 3; ++d)
            CHECK(grid.feat(0, l)[d] == doctest::Approx(before.feat(0, l)[d]).epsilon(1e-6));
    CHECK(grid.frame_size[0] == 2.0f);
    CHECK(grid.constituent_count() == doctest::Approx(6.0));
}

TEST_CASE("prune drops the least important tokens without merging") {
    TokenGrid grid(1, 2, 1);
    grid.feat(0, 0)[0] = 10.0f;
    grid.feat(0, 1)[0] = 20.0f;
    const std::vector<float> scores = {0.4f, 0.1f};
    prune(grid, scores, 1, Dimension::spatial);
    CHECK(grid.patches == 1);
    CHECK(grid.feat(0, 0)[0] == 10.0f);  // token 1 (lowest score) removed
    CHECK(grid.size_of(0, 0) == 1.0f);
}

TEST_CASE("prune with R=0 is the identity; mass strictly decreases otherwise") {
    std::mt19937 g(23);
    TokenGrid grid(4, 6, 3);
    for (auto& f : grid.features) f = uniform_range(g, -1.0f, 1.0f);
    const TokenGrid before = grid;
    std::vector<float> scores(6);
    for (auto& s : scores) s = uniform_range(g, 0.0f, 1.0f);
    prune(grid, scores, 0, Dimension::spatial);
    CHECK(grid.features == before.features);

    const double mass_before = grid.constituent_count();
    prune(grid, scores, 2, Dimension::spatial);
    CHECK(grid.constituent_count() < mass_before);

    std::vector<float> fscores(4);
    for (auto& s : fscores) s = uniform_range(g, 0.0f, 1.0f);
    const double mass_mid = grid.constituent_count();
    prune(grid, fscores, 1, Dimension::temporal);
    CHECK(grid.frames == 3);
    CHECK(grid.constituent_count() < mass_mid);
}

TEST_CASE("pairwise weighting folds in pair order instead of group-averaging") {
    // two tokens: pairwise equals sized
    TokenGrid g2(1, 2, 1);
    g2.feat(0, 0)[0] = 2.0f;
    g2.feat(0, 1)[0] = 4.0f;
    MergePlan plan2;
    plan2.n_before = 2;
    plan2.pairs = {{0, 1}};
    plan2.new_index = {0, 0};
    apply_spatial(g2, plan2, MergeWeighting::pairwise);
    CHECK(g2.feat(0, 0)[0] == doctest::Approx(3.0));
    CHECK(g2.size_of(0, 0) == 2.0f);  // bookkeeping still tracks constituents

    // three tokens into one: ((dst + s1)/2 + s2)/2 != mean
    TokenGrid g3(1, 3, 1);
    g3.feat(0, 0)[0] = 0.0f;
    g3.feat(0, 1)[0] = 1.0f;
    g3.feat(0, 2)[0] = 1.0f;
    MergePlan plan3;
    plan3.n_before = 3;
    plan3.pairs = {{0, 1}, {2, 1}};
    plan3.new_index = {0, 0, 0};
    apply_spatial(g3, plan3, MergeWeighting::pairwise);
    CHECK(g3.feat(0, 0)[0] == doctest::Approx(0.75));  // ((1+0)/2 + 1)/2
}

TEST_SUITE_END();
