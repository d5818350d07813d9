#include <cmath>

#include "doctest.h"
#include "test_helpers.hpp"
#include "vta/encoder.hpp"

using namespace vta;

TEST_SUITE_BEGIN("encoder");

TEST_CASE("paper-scale schedules") {
    EncoderConfig cfg;
    cfg.frames = 96;
    cfg.height = cfg.width = 224;
    cfg.patch = 16;  // L = 196
    cfg.dim = 768;
    cfg.heads = 12;
    cfg.blocks = 12;
    cfg.reduce_t = 4;
    cfg.reduce_s = 8;
    cfg.strategy = Strategy::importance;
    CHECK(cfg.validate().empty());
    auto sched = predicted_schedule(cfg);
    CHECK(sched.back().t_out == 48);
    CHECK(sched.back().l_out == 100);
    CHECK(sched.back().t_out * sched.back().l_out == 4800);

    cfg.frames = 32;
    cfg.reduce_t = 1;
    cfg.reduce_s = 12;
    CHECK(cfg.validate().empty());
    sched = predicted_schedule(cfg);
    CHECK(sched.back().t_out == 20);
    CHECK(sched.back().l_out == 52);
}

TEST_CASE("schedule invariant under clamping") {
    EncoderConfig cfg = small_config();
    cfg.frames = 6;
    cfg.height = cfg.width = 16;
    cfg.patch = 8;  // L = 4
    cfg.blocks = 3;
    cfg.reduce_t = 4;
    cfg.reduce_s = 1;
    cfg.strategy = Strategy::importance;
    cfg.clamp = true;
    const auto sched = predicted_schedule(cfg);
    // T: max(1, 6-4i) = 2, 1, 1 ; L: max(1, 4-i) = 3, 2, 1
    CHECK(sched[0].t_out == 2);
    CHECK(sched[1].t_out == 1);
    CHECK(sched[2].t_out == 1);
    CHECK(sched[0].l_out == 3);
    CHECK(sched[1].l_out == 2);
    CHECK(sched[2].l_out == 1);
    // once a dimension hits 1 its aggregation is skipped
    CHECK(sched[2].rt_eff == 0);
}

TEST_CASE("config validation reports schedule violations per field") {
    EncoderConfig cfg = small_config();
    cfg.height = cfg.width = 224;
    cfg.patch = 16;
    cfg.frames = 96;
    cfg.blocks = 12;
    cfg.reduce_t = 0;
    cfg.reduce_s = 100;  // 196 - 1200 < 1
    const auto errs = cfg.validate();
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("rs:") == 0);
    cfg.clamp = true;
    CHECK(cfg.validate().empty());
}

TEST_CASE("config validation enforces geometry per-block caps") {
    EncoderConfig cfg = small_config();
    cfg.frames = 12;
    cfg.blocks = 2;
    cfg.reduce_t = 5;  // block 2 sees T_i=7, needs rt <= 3
    cfg.reduce_s = 0;
    cfg.strategy = Strategy::geometry;
    const auto errs = cfg.validate();
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("rt:") == 0);
    cfg.strategy = Strategy::importance;  // importance only needs T - M*R >= 1
    CHECK(cfg.validate().empty());
}

TEST_CASE("encode: single block reduces (T, L) by (rt, rs)") {
    EncoderConfig cfg = small_config(3);
    cfg.blocks = 1;
    const RawVideo video = random_video(cfg.frames, cfg.height, cfg.width, 9);
    const EncoderWeights w = EncoderWeights::seeded(cfg);
    const EncodedVideo enc = encode(video, cfg, w);
    CHECK(enc.grid.frames == cfg.frames - cfg.reduce_t);
    CHECK(enc.grid.patches == cfg.patches_per_frame() - cfg.reduce_s);

    // disabling the temporal side only
    EncoderConfig cfg2 = cfg;
    cfg2.reduce_t = 0;
    const EncodedVideo enc2 = encode(video, cfg2, EncoderWeights::seeded(cfg2));
    CHECK(enc2.grid.frames == cfg.frames);
    CHECK(enc2.grid.patches == cfg.patches_per_frame() - cfg.reduce_s);
}

TEST_CASE("encode with rt=rs=0 equals the plain divided-attention encoder bit for bit") {
    EncoderConfig cfg = small_config(5);
    cfg.reduce_t = cfg.reduce_s = 0;
    const RawVideo video = random_video(cfg.frames, cfg.height, cfg.width, 13);
    const EncoderWeights w = EncoderWeights::seeded(cfg);
    const EncodedVideo enc = encode(video, cfg, w);

    // reference: compose the sublayers directly, no aggregation machinery
    TokenGrid grid = embed(patchify(video, cfg.patch), w.embedding);
    for (int b = 0; b < cfg.blocks; ++b) {
        temporal_attention(grid, w.blocks[b]);
        spatial_attention(grid, w.blocks[b]);
        feed_forward(grid, w.blocks[b]);
    }
    CHECK(enc.grid.features == grid.features);
    CHECK(enc.grid.cls == grid.cls);
    CHECK(enc.grid.frames == cfg.frames);
    CHECK(enc.grid.patches == cfg.patches_per_frame());
}

TEST_CASE("encode is deterministic") {
    const EncoderConfig cfg = small_config(7);
    const RawVideo video = random_video(cfg.frames, cfg.height, cfg.width, 17);
    const EncoderWeights w = EncoderWeights::seeded(cfg);
    const EncodedVideo a = encode(video, cfg, w);
    const EncodedVideo b = encode(video, cfg, w);
    CHECK(a.grid.features == b.grid.features);
    CHECK(a.grid.token_size == b.grid.token_size);
    CHECK(a.grid.frame_size == b.grid.frame_size);
    CHECK(a.cls == b.cls);
    REQUIRE(a.trajectory.blocks.size() == b.trajectory.blocks.size());
    for (size_t i = 0; i < a.trajectory.blocks.size(); ++i) {
        CHECK(a.trajectory.blocks[i].temporal_plan.pairs ==
              b.trajectory.blocks[i].temporal_plan.pairs);
        CHECK(a.trajectory.blocks[i].spatial_plans[0].pairs ==
              b.trajectory.blocks[i].spatial_plans[0].pairs);
    }
}

TEST_CASE("encode conserves constituents end to end") {
    for (uint32_t seed = 0; seed < 4; ++seed) {
        EncoderConfig cfg = small_config(seed);
        cfg.strategy = seed % 2 == 0 ? Strategy::geometry : Strategy::importance;
        const RawVideo video = random_video(cfg.frames, cfg.height, cfg.width, seed + 40);
        const EncodedVideo enc = encode(video, cfg, EncoderWeights::seeded(cfg));
        const double expect = static_cast<double>(cfg.frames) * cfg.patches_per_frame();
        CHECK(enc.grid.constituent_count() == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("recorded plans replay from captured attention stats") {
    EncoderConfig cfg = small_config(11);
    cfg.strategy = Strategy::importance;
    const RawVideo video = random_video(cfg.frames, cfg.height, cfg.width, 23);
    const EncoderWeights w = EncoderWeights::seeded(cfg);
    std::vector<BlockStats> stats;
    EncodeOptions opts;
    opts.stats_out = &stats;
    const EncodedVideo enc = encode(video, cfg, w, opts);
    REQUIRE(stats.size() == enc.trajectory.blocks.size());
    for (size_t b = 0; b < stats.size(); ++b) {
        const auto tscores = importance_scores(stats[b].temporal.attn);
        const MatchResult t = plan_importance(stats[b].temporal.keys, tscores, cfg.reduce_t);
        CHECK(t.plan.pairs == enc.trajectory.blocks[b].temporal_plan.pairs);
        const auto sscores = importance_scores(stats[b].spatial.attn);
        const MatchResult s = plan_importance(stats[b].spatial.keys, sscores, cfg.reduce_s);
        CHECK(s.plan.pairs == enc.trajectory.blocks[b].spatial_plans[0].pairs);
    }
}

TEST_CASE("zero-weight blocks: every final token is the mean of its constituents") {
    for (uint32_t seed = 0; seed < 3; ++seed) {
        EncoderConfig cfg = small_config(seed + 60);
        cfg.strategy = Strategy::geometry;
        const RawVideo video = random_video(cfg.frames, cfg.height, cfg.width, seed + 70);
        const EncoderWeights w = EncoderWeights::seeded_identity_blocks(cfg);
        const EncodedVideo enc = encode(video, cfg, w);

        const TokenGrid embedded = embed(patchify(video, cfg.patch), w.embedding);
        const GroupMap groups =
            recover_groups(enc.trajectory, cfg.frames, cfg.patches_per_frame());
        REQUIRE(groups.final_frames == enc.grid.frames);
        REQUIRE(groups.final_patches == enc.grid.patches);
        for (int t = 0; t < groups.final_frames; ++t) {
            for (int l = 0; l < groups.final_patches; ++l) {
                const auto& cells = groups.group(t, l);
                for (int d = 0; d < cfg.dim; ++d) {
                    double mean = 0.0;
                    for (const auto& [ot, ol] : cells) mean += embedded.feat(ot, ol)[d];
                    mean /= static_cast<double>(cells.size());
                    CHECK(std::abs(enc.grid.feat(t, l)[d] - mean) < 1e-4);
                }
            }
        }
    }
}

TEST_CASE("per-frame spatial planning reduces identically but with frame-local plans") {
    EncoderConfig cfg = small_config(31);
    cfg.spatial_plan = SpatialPlanMode::per_frame;
    cfg.reduce_t = 0;  // frame merging is excluded in per-frame mode tests
    const RawVideo video = random_video(cfg.frames, cfg.height, cfg.width, 33);
    const EncodedVideo enc = encode(video, cfg, EncoderWeights::seeded(cfg));
    CHECK(enc.grid.patches == cfg.patches_per_frame() - cfg.blocks * cfg.reduce_s);
    CHECK(enc.trajectory.blocks[0].spatial_plans.size() == static_cast<size_t>(cfg.frames));
    const double expect = static_cast<double>(cfg.frames) * cfg.patches_per_frame();
    CHECK(enc.grid.constituent_count() == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("encode rejects mismatched video and invalid config early") {
    EncoderConfig cfg = small_config(1);
    const EncoderWeights w = EncoderWeights::seeded(cfg);
    const RawVideo wrong = random_video(cfg.frames + 1, cfg.height, cfg.width, 3);
    CHECK_THROWS_AS(encode(wrong, cfg, w), std::invalid_argument);

    EncoderConfig bad = cfg;
    bad.reduce_s = 100;
    const RawVideo video = random_video(cfg.frames, cfg.height, cfg.width, 3);
    CHECK_THROWS_AS(encode(video, bad, w), std::invalid_argument);
}

TEST_SUITE_END();
