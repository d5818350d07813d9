// vta: desk-scale video encoder with temporal and spatial token aggregation.
// Subcommands: synth, encode, ablate, flops, visualize, probe.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vta/config.hpp"
#include "vta/costmodel.hpp"
#include "vta/runner.hpp"
#include "vta/synthdata.hpp"
#include "vta/trajectory.hpp"

namespace fs = std::filesystem;
using namespace vta;

namespace {

struct EncodeFlags {
    std::string config_path;
    std::string video_path;
    std::string out_dir;
    std::string strategy;
    std::string weighting;
    std::string spatial_plan;
    int rt = -1;
    int rs = -1;
    int frames = -1;
    long seed = -1;
    bool no_agg = false;
    bool clamp = false;
};

EncoderConfig load_config_or_die(const std::string& path) {
    ConfigParse parsed = load_config(path);
    if (!parsed.ok()) {
        std::cerr << "error: invalid config " << path << "\n";
        for (const auto& e : parsed.errors) std::cerr << "  " << e << "\n";
        std::exit(1);
    }
    return parsed.config;
}

// Flag overrides on top of the config file; re-validates afterwards.
EncoderConfig apply_overrides(EncoderConfig cfg, const EncodeFlags& f) {
    if (f.rt >= 0) cfg.reduce_t = f.rt;
    if (f.rs >= 0) cfg.reduce_s = f.rs;
    if (f.frames >= 0) cfg.frames = f.frames;
    if (f.seed >= 0) cfg.seed = static_cast<uint32_t>(f.seed);
    if (f.no_agg) cfg.reduce_t = cfg.reduce_s = 0;
    if (f.clamp) cfg.clamp = true;
    if (!f.strategy.empty())
        cfg.strategy = f.strategy == "importance" ? Strategy::importance : Strategy::geometry;
    if (!f.weighting.empty())
        cfg.weighting = f.weighting == "pairwise" ? MergeWeighting::pairwise : MergeWeighting::sized;
    if (!f.spatial_plan.empty())
        cfg.spatial_plan = f.spatial_plan == "per-frame" ? SpatialPlanMode::per_frame
                                                         : SpatialPlanMode::shared;
    const auto errs = cfg.validate();
    if (!errs.empty()) {
        std::cerr << "error: config invalid after flag overrides\n";
        for (const auto& e : errs) std::cerr << "  " << e << "\n";
        std::exit(1);
    }
    return cfg;
}

// Encode runs validate their own outputs before reporting success.
EncodeJobResult run_and_check(const EncodeJob& job) {
    EncodeJobResult res = run_encode_job(job);
    if (!job.prune_baseline) {
        const Trajectory traj = read_trajectory(res.trajectory_path);
        const GroupMap groups = recover_groups(traj, job.config.frames,
                                               job.config.patches_per_frame());
        if (groups.final_frames != res.final_frames ||
            groups.final_patches != res.final_patches)
            throw std::runtime_error("integrity: trajectory replay disagrees with run summary");
    }
    return res;
}

int cmd_synth(const std::string& out_dir, int frames, int height, int width, int patch,
              int segments, int regions_x, int regions_y, double sigma, long seed) {
    const int tiles_x = width / patch;
    const int tiles_y = height / patch;
    if (patch <= 0 || width % patch != 0 || height % patch != 0) {
        std::cerr << "error: height/width must be divisible by patch\n";
        return 1;
    }
    const auto useed = static_cast<uint32_t>(seed);
    const PlantedSpec spec = make_planted_spec(frames, segments, tiles_x, tiles_y, regions_x,
                                               regions_y, static_cast<float>(sigma), useed);
    const RawVideo video = generate(spec, height, width, useed);
    fs::create_directories(out_dir);
    const std::string video_path = out_dir + "/video.tstv";
    const std::string truth_path = out_dir + "/truth.txt";
    try {
        write_video(video, video_path);
        write_truth(spec, truth_path);
    } catch (...) {
        std::error_code ec;
        fs::remove(video_path, ec);
        fs::remove(truth_path, ec);
        throw;
    }
    std::cout << "video = " << video_path << "\n"
              << "truth = " << truth_path << "\n"
              << "frames = " << frames << "\n"
              << "segments = " << spec.num_segments() << "\n"
              << "regions = " << spec.num_regions() << "\n";
    return 0;
}

int cmd_encode(const EncodeFlags& flags) {
    EncoderConfig cfg = apply_overrides(load_config_or_die(flags.config_path), flags);

    // --frames slices the input video to its first T frames
    RawVideo video = read_video(flags.video_path);
    if (video.frames > cfg.frames) {
        RawVideo sliced(cfg.frames, video.height, video.width);
        std::copy(video.pixels.begin(), video.pixels.begin() + sliced.pixels.size(),
                  sliced.pixels.begin());
        video = std::move(sliced);
    }
    const std::string sliced_path = flags.out_dir + "/input.tstv";
    fs::create_directories(flags.out_dir);

    EncodeJob job;
    job.config = cfg;
    job.out_dir = flags.out_dir;
    if (video.frames != cfg.frames) {
        std::cerr << "error: video has " << video.frames << " frames, config wants " << cfg.frames
                  << "\n";
        return 1;
    }
    write_video(video, sliced_path);
    job.video_path = sliced_path;

    EncodeJobResult res;
    try {
        res = run_and_check(job);
    } catch (...) {
        std::error_code ec;
        fs::remove(sliced_path, ec);
        throw;
    }

    const long initial = static_cast<long>(cfg.frames) * cfg.patches_per_frame();
    std::printf("final_t = %d\n", res.final_frames);
    std::printf("final_l = %d\n", res.final_patches);
    std::printf("final_tokens = %ld\n", res.final_tokens);
    std::printf("reduction_pct = %.2f\n",
                100.0 * (1.0 - static_cast<double>(res.final_tokens) / initial));
    std::printf("wall_ms = %.1f\n", res.wall_ms);
    std::printf("out = %s\n", flags.out_dir.c_str());
    return 0;
}

int cmd_flops(const std::string& config_path, int rt, int rs, bool compare, bool joint, bool do_sweep,
              int rt_max, int rs_max, const std::string& out_path) {
    EncoderConfig cfg = load_config_or_die(config_path);
    if (rt >= 0) cfg.reduce_t = rt;
    if (rs >= 0) cfg.reduce_s = rs;
    cfg.clamp = true;  // cost tables are pure arithmetic; never reject a point

    if (do_sweep) {
        std::vector<int> rts(rt_max + 1), rss(rs_max + 1);
        std::iota(rts.begin(), rts.end(), 0);
        std::iota(rss.begin(), rss.end(), 0);
        const std::string csv = sweep_csv(cfg, sweep(cfg, rts, rss));
        if (out_path.empty()) {
            std::cout << csv;
        } else {
            std::ofstream os(out_path);
            if (!os) throw std::runtime_error("cannot open for write: " + out_path);
            os << csv;
        }
        return 0;
    }

    const FlopReport rep = flops_divided(cfg);
    std::cout << flops_csv_header() << "\n";
    const std::vector<SweepPoint> one = {{cfg.reduce_t, cfg.reduce_s, rep}};
    std::cout << sweep_csv(cfg, one).substr(flops_csv_header().size() + 1);
    std::printf("gflops = %.4f\n", rep.gflops());

    if (compare) {
        EncoderConfig base = cfg;
        base.reduce_t = base.reduce_s = 0;
        const FlopReport rep0 = flops_divided(base);
        std::printf("gflops_no_aggregation = %.4f\n", rep0.gflops());
        std::printf("gflops_ratio = %.4f\n", rep.gflops() / rep0.gflops());
    }
    if (joint) {
        const FlopReport repj = flops_joint(cfg);
        std::printf("gflops_joint = %.4f\n", repj.gflops());
        std::printf("attention_scores_ratio_joint_over_divided = %.6f\n",
                    static_cast<double>(repj.attention_scores_values()) /
                        static_cast<double>(rep.attention_scores_values()));
    }
    return 0;
}

struct AblateRow {
    std::string section, label, strategy, reduce_op;
    int rt = 0, rs = 0;
    double model_gflops = 0.0;
    bool has_run = false;
    EncodeJobResult run;
    double constituents_before = 0.0;
    bool mass_conserved = false;
    double purity = -1.0;  // < 0 = not computed
};

void write_ablation_csv(const std::string& path, const std::vector<AblateRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << "section,label,strategy,reduce_op,rt,rs,model_gflops,final_t,final_l,final_tokens,"
          "constituents_before,constituents_after,mass_conserved,purity,wall_ms\n";
    char buf[64];
    for (const AblateRow& r : rows) {
        os << r.section << ',' << r.label << ',' << r.strategy << ',' << r.reduce_op << ','
           << r.rt << ',' << r.rs << ',';
        std::snprintf(buf, sizeof(buf), "%.4f", r.model_gflops);
        os << buf << ',';
        if (r.has_run) {
            os << r.run.final_frames << ',' << r.run.final_patches << ',' << r.run.final_tokens
               << ',';
            std::snprintf(buf, sizeof(buf), "%.1f", r.constituents_before);
            os << buf << ',';
            std::snprintf(buf, sizeof(buf), "%.1f", r.run.constituents);
            os << buf << ',' << (r.mass_conserved ? 1 : 0) << ',';
            if (r.purity >= 0.0) {
                std::snprintf(buf, sizeof(buf), "%.6f", r.purity);
                os << buf;
            }
            os << ',';
            std::snprintf(buf, sizeof(buf), "%.1f", r.run.wall_ms);
            os << buf << '\n';
        } else {
            os << ",,,,,,,\n";
        }
    }
}

int cmd_ablate(const std::string& config_path, const std::string& video_path,
               const std::string& truth_path, const std::string& out_dir,
               const std::string& mode) {
    const EncoderConfig cfg = load_config_or_die(config_path);
    const bool want_dimension = mode == "all" || mode == "dimension";
    const bool want_strategy = mode == "all" || mode == "strategy";
    const bool want_reduction = mode == "all" || mode == "reduction";
    if (!want_dimension && !want_strategy && !want_reduction) {
        std::cerr << "error: --mode must be all|dimension|strategy|reduction\n";
        return 1;
    }
    if ((want_strategy || want_reduction) && video_path.empty()) {
        std::cerr << "error: strategy/reduction ablations need --video\n";
        return 1;
    }
    fs::create_directories(out_dir);

    std::vector<AblateRow> rows;
    auto model_gflops = [&](int rt, int rs) {
        EncoderConfig c = cfg;
        c.reduce_t = rt;
        c.reduce_s = rs;
        c.clamp = true;
        return flops_divided(c).gflops();
    };

    // Table-3-style dimension rows at matched compute budgets (cost model).
    if (want_dimension) {
        struct DimRow {
            const char* label;
            int rt, rs;
        };
        for (const DimRow& d : {DimRow{"only_temporal", 7, 0}, DimRow{"only_spatial", 0, 14},
                                DimRow{"both", 4, 8}}) {
            AblateRow r;
            r.section = "dimension";
            r.label = d.label;
            r.strategy = to_string(cfg.strategy);
            r.reduce_op = "aggregate";
            r.rt = d.rt;
            r.rs = d.rs;
            r.model_gflops = model_gflops(d.rt, d.rs);
            rows.push_back(r);
        }
    }

    PlantedSpec truth;
    bool have_truth = false;
    if (!truth_path.empty()) {
        truth = read_truth(truth_path);
        have_truth = true;
    }

    auto run_row = [&](const std::string& section, const std::string& label, Strategy strategy,
                       bool prune_baseline) {
        AblateRow r;
        r.section = section;
        r.label = label;
        r.strategy = to_string(strategy);
        r.reduce_op = prune_baseline ? "prune" : "aggregate";
        r.rt = cfg.reduce_t;
        r.rs = cfg.reduce_s;
        r.model_gflops = model_gflops(cfg.reduce_t, cfg.reduce_s);

        EncodeJob job;
        job.config = cfg;
        job.config.strategy = strategy;
        job.video_path = video_path;
        job.out_dir = out_dir + "/" + section + "_" + label;
        job.prune_baseline = prune_baseline;
        r.run = run_encode_job(job);
        r.has_run = true;
        r.constituents_before =
            static_cast<double>(cfg.frames) * cfg.patches_per_frame();
        r.mass_conserved = std::abs(r.run.constituents - r.constituents_before) < 1e-3;
        if (have_truth && !prune_baseline) {
            const Trajectory traj = read_trajectory(r.run.trajectory_path);
            const GroupMap groups = recover_groups(traj, cfg.frames, cfg.patches_per_frame());
            r.purity = score_purity(groups, truth);
        }
        rows.push_back(r);
    };

    if (want_strategy) {
        run_row("strategy", "importance", Strategy::importance, false);
        run_row("strategy", "geometry", Strategy::geometry, false);
    }
    if (want_reduction) {
        run_row("reduction", "aggregation", cfg.strategy, false);
        run_row("reduction", "pruning", cfg.strategy, true);
    }

    const std::string csv_path = out_dir + "/ablation.csv";
    write_ablation_csv(csv_path, rows);
    std::cout << "table = " << csv_path << "\n";
    std::cout << "rows = " << rows.size() << "\n";
    return 0;
}

int cmd_visualize(const std::string& config_path, const std::string& run_dir,
                  const std::string& out_dir, long seed) {
    const EncoderConfig cfg = load_config_or_die(config_path);
    const uint32_t palette_seed = seed >= 0 ? static_cast<uint32_t>(seed) : cfg.seed;
    run_visualize(run_dir, cfg, palette_seed, out_dir);
    std::cout << "out = " << out_dir << "\n";
    return 0;
}

int cmd_probe(const std::string& run_dir, const std::string& out_path) {
    const Trajectory traj = read_trajectory(run_dir + "/trajectory.txt");
    const std::string csv = probe_csv(similarity_probe(traj));
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot open for write: " + out_path);
        os << csv;
        std::cout << "table = " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"video encoder with temporal-spatial token aggregation"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a planted-structure synthetic video");
    std::string synth_out = "synth_out";
    int synth_frames = 16, synth_h = 64, synth_w = 64, synth_patch = 16;
    int synth_segments = 4, synth_rx = 2, synth_ry = 2;
    double synth_sigma = 0.02;
    long synth_seed = 0;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--frames", synth_frames, "frame count");
    synth->add_option("--height", synth_h, "frame height in pixels");
    synth->add_option("--width", synth_w, "frame width in pixels");
    synth->add_option("--patch", synth_patch, "patch size (tiles track patches)");
    synth->add_option("--segments", synth_segments, "temporal segments");
    synth->add_option("--regions-x", synth_rx, "spatial regions along x");
    synth->add_option("--regions-y", synth_ry, "spatial regions along y");
    synth->add_option("--sigma", synth_sigma, "uniform noise amplitude");
    synth->add_option("--seed", synth_seed, "generator seed");

    // encode
    auto* encode = app.add_subcommand("encode", "encode a video with token aggregation");
    EncodeFlags ef;
    encode->add_option("--config", ef.config_path, "encoder config file")->required();
    encode->add_option("--video", ef.video_path, "input TSTV video")->required();
    encode->add_option("--out", ef.out_dir, "output directory")->required();
    encode->add_option("--seed", ef.seed, "override config seed");
    encode->add_option("--strategy", ef.strategy, "importance|geometry")
        ->check(CLI::IsMember({"importance", "geometry"}));
    encode->add_option("--rt", ef.rt, "frames removed per block");
    encode->add_option("--rs", ef.rs, "patches removed per block");
    encode->add_option("--frames", ef.frames, "encode only the first N frames");
    encode->add_flag("--no-agg", ef.no_agg, "disable aggregation (rt = rs = 0)");
    encode->add_flag("--clamp", ef.clamp, "clamp over-aggressive schedules instead of rejecting");
    encode->add_option("--weighting", ef.weighting, "sized|pairwise")
        ->check(CLI::IsMember({"sized", "pairwise"}));
    encode->add_option("--spatial-plan", ef.spatial_plan, "shared|per-frame")
        ->check(CLI::IsMember({"shared", "per-frame"}));

    // flops
    auto* flops = app.add_subcommand("flops", "analytic FLOP tables for a config");
    std::string flops_config, flops_out;
    int flops_rt = -1, flops_rs = -1, flops_rt_max = 8, flops_rs_max = 16;
    bool flops_compare = false, flops_joint_flag = false, flops_sweep = false;
    flops->add_option("--config", flops_config, "encoder config file")->required();
    flops->add_option("--rt", flops_rt, "override rt");
    flops->add_option("--rs", flops_rs, "override rs");
    flops->add_flag("--compare", flops_compare, "also print the no-aggregation cost and ratio");
    flops->add_flag("--joint", flops_joint_flag, "also print the joint-attention comparator");
    flops->add_flag("--sweep", flops_sweep, "emit a CSV grid over rt x rs");
    flops->add_option("--rt-max", flops_rt_max, "sweep upper bound for rt");
    flops->add_option("--rs-max", flops_rs_max, "sweep upper bound for rs");
    flops->add_option("--out", flops_out, "write the sweep CSV here instead of stdout");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "strategy/dimension/reduction ablation tables");
    std::string abl_config, abl_video, abl_truth, abl_out = "ablate_out", abl_mode = "all";
    ablate->add_option("--config", abl_config, "encoder config file")->required();
    ablate->add_option("--video", abl_video, "input TSTV video (needed for run-backed rows)");
    ablate->add_option("--truth", abl_truth, "planted ground truth for purity scoring");
    ablate->add_option("--out", abl_out, "output directory");
    ablate->add_option("--mode", abl_mode, "all|dimension|strategy|reduction");

    // visualize
    auto* visualize = app.add_subcommand("visualize", "render merge-group masks from a run");
    std::string vis_config, vis_run, vis_out = "masks";
    long vis_seed = -1;
    visualize->add_option("--config", vis_config, "encoder config file")->required();
    visualize->add_option("--run", vis_run, "encode output directory")->required();
    visualize->add_option("--out", vis_out, "mask output directory");
    visualize->add_option("--seed", vis_seed, "palette seed (defaults to config seed)");

    // probe
    auto* probe = app.add_subcommand("probe", "merged vs unmerged similarity statistics");
    std::string probe_run, probe_out;
    probe->add_option("--run", probe_run, "encode output directory")->required();
    probe->add_option("--out", probe_out, "write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed())
            return cmd_synth(synth_out, synth_frames, synth_h, synth_w, synth_patch,
                             synth_segments, synth_rx, synth_ry, synth_sigma, synth_seed);
        if (encode->parsed()) return cmd_encode(ef);
        if (flops->parsed())
            return cmd_flops(flops_config, flops_rt, flops_rs, flops_compare, flops_joint_flag,
                             flops_sweep, flops_rt_max, flops_rs_max, flops_out);
        if (ablate->parsed()) return cmd_ablate(abl_config, abl_video, abl_truth, abl_out, abl_mode);
        if (visualize->parsed()) return cmd_visualize(vis_config, vis_run, vis_out, vis_seed);
        if (probe->parsed()) return cmd_probe(probe_run, probe_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
