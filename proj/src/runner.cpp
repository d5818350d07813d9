#include "vta/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "vta/config.hpp"
#include "vta/tensor_io.hpp"
#include "vta/trajectory.hpp"

namespace vta {

namespace fs = std::filesystem;

namespace {

void write_summary(const std::string& path, const EncoderConfig& cfg, const EncodedVideo& enc,
                   const EncodeJobResult& res, bool prune_baseline) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << "frames = " << cfg.frames << "\n"
       << "patches = " << cfg.patches_per_frame() << "\n"
       << "dim = " << cfg.dim << "\n"
       << "heads = " << cfg.heads << "\n"
       << "blocks = " << cfg.blocks << "\n"
       << "rt = " << cfg.reduce_t << "\n"
       << "rs = " << cfg.reduce_s << "\n"
       << "strategy = " << to_string(cfg.strategy) << "\n"
       << "weighting = " << to_string(cfg.weighting) << "\n"
       << "spatial_plan = " << to_string(cfg.spatial_plan) << "\n"
       << "seed = " << cfg.seed << "\n"
       << "clamp = " << (cfg.clamp ? "true" : "false") << "\n"
       << "reduce_op = " << (prune_baseline ? "prune" : "aggregate") << "\n";
    for (size_t b = 0; b < enc.trajectory.blocks.size(); ++b) {
        const BlockTrace& blk = enc.trajectory.blocks[b];
        os << "block" << (b + 1) << "_t = " << blk.t_out << "\n";
        os << "block" << (b + 1) << "_l = " << blk.l_out << "\n";
    }
    os << "final_t = " << res.final_frames << "\n"
       << "final_l = " << res.final_patches << "\n"
       << "final_tokens = " << res.final_tokens << "\n"
       << "constituents = " << res.constituents << "\n"
       << "wall_ms = " << res.wall_ms << "\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace

EncodeJobResult run_encode_job(const EncodeJob& job) {
    const auto errs = job.config.validate();
    if (!errs.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }

    const RawVideo video = read_video(job.video_path);
    const EncoderWeights weights = EncoderWeights::seeded(job.config);

    const auto t0 = std::chrono::steady_clock::now();
    EncodeOptions opts;
    opts.prune_baseline = job.prune_baseline;
    EncodedVideo enc = encode(video, job.config, weights, opts);
    const auto t1 = std::chrono::steady_clock::now();

    fs::create_directories(job.out_dir);
    EncodeJobResult res;
    res.final_frames = enc.grid.frames;
    res.final_patches = enc.grid.patches;
    res.final_tokens = static_cast<long>(enc.grid.frames) * enc.grid.patches;
    res.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    res.constituents = enc.grid.constituent_count();
    res.encoded_path = job.out_dir + "/encoded.tstw";
    res.trajectory_path = job.out_dir + "/trajectory.txt";
    res.summary_path = job.out_dir + "/summary.txt";

    std::vector<std::string> written;
    try {
        std::vector<NamedTensor> ts;
        ts.push_back({"features",
                      {static_cast<uint32_t>(enc.grid.frames),
                       static_cast<uint32_t>(enc.grid.patches),
                       static_cast<uint32_t>(enc.grid.dim)},
                      enc.grid.features});
        ts.push_back({"token_size",
                      {static_cast<uint32_t>(enc.grid.frames),
                       static_cast<uint32_t>(enc.grid.patches)},
                      enc.grid.token_size});
        ts.push_back({"frame_size", {static_cast<uint32_t>(enc.grid.frames)}, enc.grid.frame_size});
        ts.push_back({"cls", {static_cast<uint32_t>(enc.grid.dim)}, enc.grid.cls});
        write_tensors(res.encoded_path, ts);
        written.push_back(res.encoded_path);

        write_trajectory(enc.trajectory, res.trajectory_path);
        written.push_back(res.trajectory_path);

        write_summary(res.summary_path, job.config, enc, res, job.prune_baseline);
        written.push_back(res.summary_path);
    } catch (...) {
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        throw;
    }
    return res;
}

void run_visualize(const std::string& run_dir, const EncoderConfig& cfg, uint32_t palette_seed,
                   const std::string& out_dir) {
    const Trajectory traj = read_trajectory(run_dir + "/trajectory.txt");
    const GroupMap groups = recover_groups(traj, cfg.frames, cfg.patches_per_frame());
    fs::create_directories(out_dir);
    render_masks(groups, cfg.height, cfg.width, cfg.patch, palette_seed, out_dir);
    write_group_index(groups, out_dir + "/groups.txt");
}

}  // namespace vta
