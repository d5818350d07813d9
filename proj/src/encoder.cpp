#include "vta/encoder.hpp"

#include <random>
#include <stdexcept>

#include "vta/tensor_io.hpp"

namespace vta {

namespace {

int clamp_reduce(int n, int want, Strategy strategy, bool clamped) {
    if (want <= 0 || n <= 1) return 0;
    int r = want;
    if (clamped) {
        r = std::min(r, n - 1);
        if (strategy == Strategy::geometry) r = std::min(r, n / 2);
    }
    return r;
}

void append_field(std::vector<std::string>& errs, const std::string& msg) { errs.push_back(msg); }

}  // namespace

std::vector<std::string> EncoderConfig::validate() const {
    std::vector<std::string> errs;
    if (frames < 1) append_field(errs, "frames: must be >= 1");
    if (height < 1) append_field(errs, "height: must be >= 1");
    if (width < 1) append_field(errs, "width: must be >= 1");
    if (patch < 1) append_field(errs, "patch: must be >= 1");
    if (patch >= 1 && height >= 1 && height % patch != 0)
        append_field(errs, "height: " + std::to_string(height) + " not divisible by patch " +
                               std::to_string(patch));
    if (patch >= 1 && width >= 1 && width % patch != 0)
        append_field(errs, "width: " + std::to_string(width) + " not divisible by patch " +
                               std::to_string(patch));
    if (dim < 1) append_field(errs, "dim: must be >= 1");
    if (heads < 1) append_field(errs, "heads: must be >= 1");
    if (dim >= 1 && heads >= 1 && dim % heads != 0)
        append_field(errs, "heads: " + std::to_string(heads) + " does not divide dim " +
                               std::to_string(dim));
    if (blocks < 1) append_field(errs, "blocks: must be >= 1");
    if (reduce_t < 0) append_field(errs, "rt: must be >= 0");
    if (reduce_s < 0) append_field(errs, "rs: must be >= 0");
    if (!errs.empty()) return errs;  // schedule checks need sane dimensions

    const int l = patches_per_frame();
    if (!clamp) {
        if (frames - blocks * reduce_t < 1)
            append_field(errs, "rt: schedule leaves " +
                                   std::to_string(frames - blocks * reduce_t) +
                                   " frames (need >= 1, or enable clamp)");
        if (l - blocks * reduce_s < 1)
            append_field(errs, "rs: schedule leaves " +
                                   std::to_string(l - blocks * reduce_s) +
                                   " patches (need >= 1, or enable clamp)");
        if (strategy == Strategy::geometry && errs.empty()) {
            // geometry can remove at most floor(N/2) per block; the last
            // block sees the smallest N
            if (reduce_t > 0) {
                const int t_last = frames - (blocks - 1) * reduce_t;
                if (reduce_t > t_last / 2)
                    append_field(errs, "rt: geometry needs rt <= floor(T_i/2) in every block "
                                       "(block " + std::to_string(blocks) + " has T_i=" +
                                       std::to_string(t_last) + ")");
            }
            if (reduce_s > 0) {
                const int l_last = l - (blocks - 1) * reduce_s;
                if (reduce_s > l_last / 2)
                    append_field(errs, "rs: geometry needs rs <= floor(L_i/2) in every block "
                                       "(block " + std::to_string(blocks) + " has L_i=" +
                                       std::to_string(l_last) + ")");
            }
        }
    }
    return errs;
}

std::vector<ScheduleEntry> predicted_schedule(const EncoderConfig& cfg) {
    std::vector<ScheduleEntry> sched(cfg.blocks);
    int t = cfg.frames;
    int l = cfg.patches_per_frame();
    for (int b = 0; b < cfg.blocks; ++b) {
        ScheduleEntry& e = sched[b];
        e.t_in = t;
        e.l_in = l;
        e.rt_eff = clamp_reduce(t, cfg.reduce_t, cfg.strategy, cfg.clamp);
        e.rs_eff = clamp_reduce(l, cfg.reduce_s, cfg.strategy, cfg.clamp);
        t -= e.rt_eff;
        l -= e.rs_eff;
        e.t_out = t;
        e.l_out = l;
    }
    return sched;
}

EncoderWeights EncoderWeights::seeded(const EncoderConfig& cfg) {
    EncoderWeights w;
    w.embedding = EmbeddingWeights::seeded(3 * cfg.patch * cfg.patch, cfg.dim,
                                           cfg.patches_per_frame(), cfg.frames, cfg.seed);
    std::mt19937 g(cfg.seed + 0x9e3779b9u);
    w.blocks.reserve(cfg.blocks);
    for (int b = 0; b < cfg.blocks; ++b) w.blocks.push_back(BlockWeights::seeded(cfg.dim, cfg.heads, g));
    return w;
}

EncoderWeights EncoderWeights::seeded_identity_blocks(const EncoderConfig& cfg) {
    EncoderWeights w;
    w.embedding = EmbeddingWeights::seeded(3 * cfg.patch * cfg.patch, cfg.dim,
                                           cfg.patches_per_frame(), cfg.frames, cfg.seed);
    for (int b = 0; b < cfg.blocks; ++b) w.blocks.push_back(BlockWeights::zeros(cfg.dim, cfg.heads));
    return w;
}

void EncoderWeights::save(const std::string& path) const {
    std::vector<NamedTensor> ts;
    auto mat = [&](const std::string& name, const Matrix& m) {
        ts.push_back({name,
                      {static_cast<uint32_t>(m.rows), static_cast<uint32_t>(m.cols)},
                      m.data});
    };
    auto vec = [&](const std::string& name, const std::vector<float>& v) {
        ts.push_back({name, {static_cast<uint32_t>(v.size())}, v});
    };
    mat("embed.patch_proj", embedding.patch_proj);
    mat("embed.spatial_pos", embedding.spatial_pos);
    mat("embed.temporal_pos", embedding.temporal_pos);
    vec("embed.cls", embedding.cls_seed);
    for (size_t b = 0; b < blocks.size(); ++b) {
        const std::string pre = "block" + std::to_string(b) + ".";
        const BlockWeights& bw = blocks[b];
        for (auto [tag, sub] : {std::pair{"temporal.", &bw.temporal},
                                std::pair{"spatial.", &bw.spatial}}) {
            mat(pre + tag + "wq", sub->wq);
            mat(pre + tag + "wk", sub->wk);
            mat(pre + tag + "wv", sub->wv);
            mat(pre + tag + "wo", sub->wo);
            vec(pre + tag + "ln_gamma", sub->ln_gamma);
            vec(pre + tag + "ln_beta", sub->ln_beta);
        }
        mat(pre + "ffn.w1", bw.ffn.w1);
        mat(pre + "ffn.w2", bw.ffn.w2);
        vec(pre + "ffn.ln_gamma", bw.ffn.ln_gamma);
        vec(pre + "ffn.ln_beta", bw.ffn.ln_beta);
    }
    write_tensors(path, ts);
}

EncoderWeights EncoderWeights::load(const std::string& path, const EncoderConfig& cfg) {
    const auto ts = read_tensors(path);
    auto mat = [&](const std::string& name) {
        const NamedTensor& t = find_tensor(ts, name);
        if (t.dims.size() != 2) throw std::runtime_error("weights: '" + name + "' must be rank 2");
        return Matrix(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]), t.data);
    };
    auto vec = [&](const std::string& name) {
        const NamedTensor& t = find_tensor(ts, name);
        if (t.dims.size() != 1) throw std::runtime_error("weights: '" + name + "' must be rank 1");
        return t.data;
    };
    EncoderWeights w;
    w.embedding.patch_proj = mat("embed.patch_proj");
    w.embedding.spatial_pos = mat("embed.spatial_pos");
    w.embedding.temporal_pos = mat("embed.temporal_pos");
    w.embedding.cls_seed = vec("embed.cls");
    w.embedding.patch_dim = w.embedding.patch_proj.rows;
    w.embedding.dim = w.embedding.patch_proj.cols;
    w.embedding.max_frames = w.embedding.temporal_pos.rows;
    for (int b = 0; b < cfg.blocks; ++b) {
        const std::string pre = "block" + std::to_string(b) + ".";
        BlockWeights bw;
        bw.dim = cfg.dim;
        bw.heads = cfg.heads;
        for (auto [tag, sub] : {std::pair{"temporal.", &bw.temporal},
                                std::pair{"spatial.", &bw.spatial}}) {
            sub->wq = mat(pre + tag + "wq");
            sub->wk = mat(pre + tag + "wk");
            sub->wv = mat(pre + tag + "wv");
            sub->wo = mat(pre + tag + "wo");
            sub->ln_gamma = vec(pre + tag + "ln_gamma");
            sub->ln_beta = vec(pre + tag + "ln_beta");
        }
        bw.ffn.w1 = mat(pre + "ffn.w1");
        bw.ffn.w2 = mat(pre + "ffn.w2");
        bw.ffn.ln_gamma = vec(pre + "ffn.ln_gamma");
        bw.ffn.ln_beta = vec(pre + "ffn.ln_beta");
        w.blocks.push_back(std::move(bw));
    }
    return w;
}

EncodedVideo encode(const RawVideo& video, const EncoderConfig& cfg, const EncoderWeights& w,
                    const EncodeOptions& opts) {
    const auto errs = cfg.validate();
    if (!errs.empty()) {
        std::string msg = "encode: invalid config:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
    if (video.frames != cfg.frames || video.height != cfg.height || video.width != cfg.width)
        throw std::invalid_argument("encode: video shape " + std::to_string(video.frames) + "x" +
                                    std::to_string(video.height) + "x" +
                                    std::to_string(video.width) + " does not match config");
    if (static_cast<int>(w.blocks.size()) != cfg.blocks)
        throw std::invalid_argument("encode: weights have " + std::to_string(w.blocks.size()) +
                                    " blocks, config wants " + std::to_string(cfg.blocks));

    const PatchTensor patches = patchify(video, cfg.patch);
    TokenGrid grid = embed(patches, w.embedding);

    EncodedVideo out;
    out.trajectory.frames = cfg.frames;
    out.trajectory.patches = grid.patches;
    out.trajectory.spatial_mode = cfg.spatial_plan;

    const auto sched = predicted_schedule(cfg);
    for (int b = 0; b < cfg.blocks; ++b) {
        BlockTrace trace;
        trace.t_in = grid.frames;
        trace.l_in = grid.patches;

        // temporal attention, then frame aggregation
        AttnStats tstats = temporal_attention(grid, w.blocks[b]);
        const int rt = sched[b].rt_eff;
        if (rt > 0) {
            if (opts.prune_baseline) {
                const auto scores = importance_scores(tstats.attn);
                prune(grid, scores, rt, Dimension::temporal);
                trace.temporal_plan.n_before = trace.t_in;  // no pairs: prune drops tokens
            } else if (cfg.strategy == Strategy::importance) {
                const auto scores = importance_scores(tstats.attn);
                MatchResult r = plan_importance(tstats.keys, scores, rt);
                apply_temporal(grid, r.plan, cfg.weighting);
                trace.temporal_plan = std::move(r.plan);
                trace.temporal_candidates = std::move(r.candidates);
            } else {
                MatchResult r = plan_geometry(tstats.keys, rt);
                apply_temporal(grid, r.plan, cfg.weighting);
                trace.temporal_plan = std::move(r.plan);
                trace.temporal_candidates = std::move(r.candidates);
            }
        } else {
            trace.temporal_plan.n_before = trace.t_in;
        }

        // spatial attention, then patch aggregation
        const bool per_frame = cfg.spatial_plan == SpatialPlanMode::per_frame;
        AttnStats sstats = spatial_attention(grid, w.blocks[b], per_frame);
        const int rs = sched[b].rs_eff;
        if (rs > 0) {
            if (opts.prune_baseline) {
                const auto scores = importance_scores(sstats.attn);
                prune(grid, scores, rs, Dimension::spatial);
                MergePlan skip;
                skip.n_before = trace.l_in;
                trace.spatial_plans.push_back(std::move(skip));
            } else if (per_frame) {
                std::vector<MergePlan> plans;
                plans.reserve(grid.frames);
                for (int t = 0; t < grid.frames; ++t) {
                    MatchResult r;
                    if (cfg.strategy == Strategy::importance) {
                        const auto scores = importance_scores(sstats.attn_per_frame[t]);
                        r = plan_importance(sstats.keys_per_frame[t], scores, rs);
                    } else {
                        r = plan_geometry(sstats.keys_per_frame[t], rs);
                    }
                    plans.push_back(std::move(r.plan));
                    trace.spatial_candidates.insert(trace.spatial_candidates.end(),
                                                    r.candidates.begin(), r.candidates.end());
                }
                apply_spatial_per_frame(grid, plans, cfg.weighting);
                trace.spatial_plans = std::move(plans);
            } else {
                MatchResult r;
                if (cfg.strategy == Strategy::importance) {
                    const auto scores = importance_scores(sstats.attn);
                    r = plan_importance(sstats.keys, scores, rs);
                } else {
                    r = plan_geometry(sstats.keys, rs);
                }
                apply_spatial(grid, r.plan, cfg.weighting);
                trace.spatial_plans.push_back(std::move(r.plan));
                trace.spatial_candidates = std::move(r.candidates);
            }
        } else {
            MergePlan skip;
            skip.n_before = trace.l_in;
            trace.spatial_plans.push_back(std::move(skip));
        }

        feed_forward(grid, w.blocks[b]);

        trace.t_out = grid.frames;
        trace.l_out = grid.patches;
        if (opts.stats_out)
            opts.stats_out->push_back({std::move(tstats), std::move(sstats)});
        out.trajectory.blocks.push_back(std::move(trace));
    }

    out.cls = grid.cls;
    out.grid = std::move(grid);
    return out;
}

}  // namespace vta
