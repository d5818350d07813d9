#include "vta/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vta/rng.hpp"

namespace vta {

namespace {

void integrity_error(int block, const std::string& what) {
    throw std::runtime_error("trajectory: block " + std::to_string(block + 1) + ": " + what);
}

// Validates a plan against the current set size; merged srcs must be
// distinct and never act as destinations.
void check_replay_plan(const MergePlan& plan, int n, int block, const char* tag) {
    if (plan.n_before != n)
        integrity_error(block, std::string(tag) + " plan built for " +
                                   std::to_string(plan.n_before) + " tokens, set has " +
                                   std::to_string(n));
    std::vector<bool> is_src(n, false);
    for (const auto& [src, dst] : plan.pairs) {
        if (src < 0 || src >= n || dst < 0 || dst >= n)
            integrity_error(block, std::string(tag) + " pair index out of range");
        if (src == dst) integrity_error(block, std::string(tag) + " pair merges a token into itself");
        if (is_src[src]) integrity_error(block, std::string(tag) + " duplicate source");
        is_src[src] = true;
    }
    for (const auto& [src, dst] : plan.pairs)
        if (is_src[dst]) integrity_error(block, std::string(tag) + " destination is also a source");
}

template <typename T>
std::vector<T> replay_merge(const std::vector<T>& items, const MergePlan& plan,
                            void (*fold)(T&, const T&)) {
    std::vector<bool> is_src(items.size(), false);
    for (const auto& [src, dst] : plan.pairs) is_src[src] = true;
    std::vector<T> merged = items;
    for (const auto& [src, dst] : plan.pairs) fold(merged[dst], merged[src]);
    std::vector<T> out;
    out.reserve(items.size() - plan.pairs.size());
    for (size_t i = 0; i < merged.size(); ++i)
        if (!is_src[i]) out.push_back(std::move(merged[i]));
    return out;
}

void fold_ints(std::vector<int>& dst, const std::vector<int>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

void fold_cells(std::vector<std::pair<int, int>>& dst,
                const std::vector<std::pair<int, int>>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

GroupMap recover_groups(const Trajectory& traj, int frames, int patches) {
    if (traj.frames != frames || traj.patches != patches)
        throw std::runtime_error("trajectory: recorded for " + std::to_string(traj.frames) + "x" +
                                 std::to_string(traj.patches) + " grid, caller expects " +
                                 std::to_string(frames) + "x" + std::to_string(patches));

    std::vector<std::vector<int>> frame_groups(frames);
    for (int t = 0; t < frames; ++t) frame_groups[t] = {t};
    // rows[t][l] = original cells currently aggregated at slot (t, l)
    std::vector<std::vector<std::vector<std::pair<int, int>>>> rows(frames);
    for (int t = 0; t < frames; ++t) {
        rows[t].resize(patches);
        for (int l = 0; l < patches; ++l) rows[t][l] = {{t, l}};
    }

    for (size_t b = 0; b < traj.blocks.size(); ++b) {
        const BlockTrace& blk = traj.blocks[b];
        const int t_now = static_cast<int>(rows.size());
        const int l_now = t_now > 0 ? static_cast<int>(rows[0].size()) : 0;
        if (blk.t_in != t_now || blk.l_in != l_now)
            integrity_error(static_cast<int>(b), "recorded entry shape " +
                                                     std::to_string(blk.t_in) + "x" +
                                                     std::to_string(blk.l_in) + " vs replayed " +
                                                     std::to_string(t_now) + "x" +
                                                     std::to_string(l_now));

        // temporal: union merged frames' cells position by position
        check_replay_plan(blk.temporal_plan, t_now, static_cast<int>(b), "temporal");
        if (!blk.temporal_plan.pairs.empty()) {
            frame_groups = replay_merge(frame_groups, blk.temporal_plan, fold_ints);
            std::vector<bool> is_src(t_now, false);
            for (const auto& [src, dst] : blk.temporal_plan.pairs) is_src[src] = true;
            for (const auto& [src, dst] : blk.temporal_plan.pairs)
                for (int l = 0; l < l_now; ++l) fold_cells(rows[dst][l], rows[src][l]);
            std::vector<std::vector<std::vector<std::pair<int, int>>>> kept;
            for (int t = 0; t < t_now; ++t)
                if (!is_src[t]) kept.push_back(std::move(rows[t]));
            rows = std::move(kept);
        }

        // spatial: shared plan applies to every frame, otherwise one per frame
        const int t_mid = static_cast<int>(rows.size());
        if (blk.spatial_plans.empty())
            integrity_error(static_cast<int>(b), "missing spatial plan");
        const bool shared = blk.spatial_plans.size() == 1;
        if (!shared && static_cast<int>(blk.spatial_plans.size()) != t_mid)
            integrity_error(static_cast<int>(b),
                            "have " + std::to_string(blk.spatial_plans.size()) +
                                " spatial plans for " + std::to_string(t_mid) + " frames");
        for (int t = 0; t < t_mid; ++t) {
            const MergePlan& plan = blk.spatial_plans[shared ? 0 : t];
            check_replay_plan(plan, l_now, static_cast<int>(b), "spatial");
            if (!plan.pairs.empty()) rows[t] = replay_merge(rows[t], plan, fold_cells);
        }

        const int t_after = static_cast<int>(rows.size());
        const int l_after = t_after > 0 ? static_cast<int>(rows[0].size()) : 0;
        if (blk.t_out != t_after || blk.l_out != l_after)
            integrity_error(static_cast<int>(b),
                            "recorded exit shape " + std::to_string(blk.t_out) + "x" +
                                std::to_string(blk.l_out) + " vs replayed " +
                                std::to_string(t_after) + "x" + std::to_string(l_after) +
                                " (plans do not explain the reduction)");
    }

    GroupMap out;
    out.frames = frames;
    out.patches = patches;
    out.final_frames = static_cast<int>(rows.size());
    out.final_patches = out.final_frames > 0 ? static_cast<int>(rows[0].size()) : 0;
    out.frame_groups = std::move(frame_groups);
    for (auto& g : out.frame_groups) std::sort(g.begin(), g.end());
    out.groups.reserve(static_cast<size_t>(out.final_frames) * out.final_patches);
    size_t covered = 0;
    for (auto& frame : rows) {
        for (auto& cells : frame) {
            std::sort(cells.begin(), cells.end());
            covered += cells.size();
            out.groups.push_back(std::move(cells));
        }
    }
    if (covered != static_cast<size_t>(frames) * patches)
        throw std::runtime_error("trajectory: groups cover " + std::to_string(covered) +
                                 " cells, expected " + std::to_string(frames * patches));
    return out;
}

namespace {

struct Rgb {
    unsigned char r, g, b;
};

Rgb group_color(uint32_t seed, int group_id) {
    const uint32_t h = hash_u32(seed ^ (static_cast<uint32_t>(group_id) * 2654435761u));
    // keep channels away from the extremes so borders stay visible
    return {static_cast<unsigned char>(40 + (h & 0xff) % 176),
            static_cast<unsigned char>(40 + ((h >> 8) & 0xff) % 176),
            static_cast<unsigned char>(40 + ((h >> 16) & 0xff) % 176)};
}

}  // namespace

void render_masks(const GroupMap& groups, int height, int width, int patch_size, uint32_t seed,
                  const std::string& out_dir) {
    const int tiles_x = width / patch_size;
    const int tiles_y = height / patch_size;
    if (tiles_x * tiles_y != groups.patches)
        throw std::invalid_argument("render_masks: geometry does not match group map");

    for (int ft = 0; ft < groups.final_frames; ++ft) {
        const int t_rep = groups.frame_groups[ft].front();
        std::vector<unsigned char> img(static_cast<size_t>(height) * width * 3, 0);
        for (int fl = 0; fl < groups.final_patches; ++fl) {
            const auto& cells = groups.group(ft, fl);
            // canonical spatial id: smallest original tile of the
            // representative frame in this group
            int gid = -1;
            for (const auto& [t, l] : cells)
                if (t == t_rep && (gid < 0 || l < gid)) gid = l;
            if (gid < 0) continue;
            const Rgb color = group_color(seed, gid);
            for (const auto& [t, l] : cells) {
                if (t != t_rep) continue;
                const int ty = l / tiles_x, tx = l % tiles_x;
                for (int py = 0; py < patch_size; ++py) {
                    const size_t row0 =
                        (static_cast<size_t>(ty * patch_size + py) * width + tx * patch_size) * 3;
                    for (int px = 0; px < patch_size; ++px) {
                        img[row0 + 3 * px + 0] = color.r;
                        img[row0 + 3 * px + 1] = color.g;
                        img[row0 + 3 * px + 2] = color.b;
                    }
                }
            }
        }
        char name[32];
        std::snprintf(name, sizeof(name), "mask_%04d.ppm", ft);
        std::ofstream os(out_dir + "/" + name, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write mask image in " + out_dir);
        os << "P6\n" << width << " " << height << "\n255\n";
        os.write(reinterpret_cast<const char*>(img.data()),
                 static_cast<std::streamsize>(img.size()));
    }

    std::ofstream idx(out_dir + "/frame_groups.txt");
    if (!idx) throw std::runtime_error("cannot write frame group index in " + out_dir);
    for (int ft = 0; ft < groups.final_frames; ++ft) {
        idx << "frame_group " << ft << " :";
        for (int t : groups.frame_groups[ft]) idx << " " << t;
        idx << "\n";
    }
}

void write_group_index(const GroupMap& groups, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    for (int ft = 0; ft < groups.final_frames; ++ft) {
        for (int fl = 0; fl < groups.final_patches; ++fl) {
            os << ft << " " << fl << " :";
            for (const auto& [t, l] : groups.group(ft, fl)) os << " (" << t << "," << l << ")";
            os << "\n";
        }
    }
}

std::vector<ProbeRow> similarity_probe(const Trajectory& traj) {
    std::vector<ProbeRow> rows;
    for (size_t b = 0; b < traj.blocks.size(); ++b) {
        for (auto [dim, cands] : {std::pair{Dimension::temporal, &traj.blocks[b].temporal_candidates},
                                  std::pair{Dimension::spatial, &traj.blocks[b].spatial_candidates}}) {
            ProbeRow row;
            row.block = static_cast<int>(b) + 1;
            row.dimension = dim;
            double sum_m = 0.0, sum_u = 0.0;
            int n_m = 0, n_u = 0;
            for (const MatchCandidate& c : *cands) {
                if (c.merged) {
                    sum_m += c.sim;
                    ++n_m;
                } else {
                    sum_u += c.sim;
                    ++n_u;
                }
            }
            row.candidates = n_m + n_u;
            row.merged = n_m;
            row.mean_sim_merged = n_m > 0 ? sum_m / n_m : std::nan("");
            row.mean_sim_unmerged = n_u > 0 ? sum_u / n_u : std::nan("");
            rows.push_back(row);
        }
    }
    return rows;
}

std::string probe_csv(const std::vector<ProbeRow>& rows) {
    std::ostringstream os;
    os << "block,tokens,candidates,merged,mean_sim_merged,mean_sim_unmerged\n";
    char buf[64];
    for (const ProbeRow& r : rows) {
        os << r.block << ',' << (r.dimension == Dimension::temporal ? "frame" : "patch") << ','
           << r.candidates << ',' << r.merged << ',';
        std::snprintf(buf, sizeof(buf), "%.9g", r.mean_sim_merged);
        os << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.9g", r.mean_sim_unmerged);
        os << buf << '\n';
    }
    return os.str();
}

namespace {

void write_plan(std::ostream& os, const MergePlan& plan) {
    os << "plan n " << plan.n_before << " pairs " << plan.pairs.size() << "\n";
    for (const auto& [src, dst] : plan.pairs) os << "p " << src << " " << dst << "\n";
}

void write_candidates(std::ostream& os, const std::vector<MatchCandidate>& cands) {
    os << "candidates " << cands.size() << "\n";
    char buf[64];
    for (const auto& c : cands) {
        std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(c.sim));
        os << "c " << c.src << " " << c.dst << " " << buf << " " << (c.merged ? 1 : 0) << "\n";
    }
}

}  // namespace

void write_trajectory(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << "VTATRAJ 1\n";
    os << "frames " << traj.frames << "\n";
    os << "patches " << traj.patches << "\n";
    os << "spatial_mode " << (traj.spatial_mode == SpatialPlanMode::shared ? "shared" : "per_frame")
       << "\n";
    os << "blocks " << traj.blocks.size() << "\n";
    for (size_t b = 0; b < traj.blocks.size(); ++b) {
        const BlockTrace& blk = traj.blocks[b];
        os << "block " << (b + 1) << " t_in " << blk.t_in << " l_in " << blk.l_in << " t_out "
           << blk.t_out << " l_out " << blk.l_out << "\n";
        os << "temporal ";
        write_plan(os, blk.temporal_plan);
        write_candidates(os, blk.temporal_candidates);
        os << "spatial_plans " << blk.spatial_plans.size() << "\n";
        for (const MergePlan& p : blk.spatial_plans) {
            os << "spatial ";
            write_plan(os, p);
        }
        write_candidates(os, blk.spatial_candidates);
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string next_token(std::istream& is, const std::string& path) {
    std::string tok;
    if (!(is >> tok)) throw std::runtime_error("trajectory file truncated: " + path);
    return tok;
}

long next_long(std::istream& is, const std::string& path) {
    long v;
    if (!(is >> v)) throw std::runtime_error("trajectory file: expected number: " + path);
    return v;
}

void expect(std::istream& is, const std::string& path, const std::string& want) {
    const std::string got = next_token(is, path);
    if (got != want)
        throw std::runtime_error("trajectory file: expected '" + want + "', got '" + got +
                                 "': " + path);
}

MergePlan read_plan(std::istream& is, const std::string& path) {
    expect(is, path, "plan");
    expect(is, path, "n");
    MergePlan plan;
    plan.n_before = static_cast<int>(next_long(is, path));
    expect(is, path, "pairs");
    const long n_pairs = next_long(is, path);
    for (long i = 0; i < n_pairs; ++i) {
        expect(is, path, "p");
        const int src = static_cast<int>(next_long(is, path));
        const int dst = static_cast<int>(next_long(is, path));
        plan.pairs.emplace_back(src, dst);
    }
    // rebuild the remapping rather than trusting the file
    std::vector<bool> is_src(std::max(plan.n_before, 0), false);
    for (const auto& [src, dst] : plan.pairs)
        if (src >= 0 && src < plan.n_before) is_src[src] = true;
    plan.new_index.assign(plan.n_before, -1);
    int next = 0;
    for (int i = 0; i < plan.n_before; ++i)
        if (!is_src[i]) plan.new_index[i] = next++;
    for (const auto& [src, dst] : plan.pairs)
        if (src >= 0 && src < plan.n_before && dst >= 0 && dst < plan.n_before)
            plan.new_index[src] = plan.new_index[dst];
    return plan;
}

std::vector<MatchCandidate> read_candidates(std::istream& is, const std::string& path) {
    expect(is, path, "candidates");
    const long n = next_long(is, path);
    std::vector<MatchCandidate> out;
    for (long i = 0; i < n; ++i) {
        expect(is, path, "c");
        MatchCandidate c;
        c.src = static_cast<int>(next_long(is, path));
        c.dst = static_cast<int>(next_long(is, path));
        double sim;
        if (!(is >> sim)) throw std::runtime_error("trajectory file: bad similarity: " + path);
        c.sim = static_cast<float>(sim);
        c.merged = next_long(is, path) != 0;
        out.push_back(c);
    }
    return out;
}

}  // namespace

Trajectory read_trajectory(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    expect(is, path, "VTATRAJ");
    if (next_long(is, path) != 1) throw std::runtime_error("trajectory file: unknown version");
    Trajectory traj;
    expect(is, path, "frames");
    traj.frames = static_cast<int>(next_long(is, path));
    expect(is, path, "patches");
    traj.patches = static_cast<int>(next_long(is, path));
    expect(is, path, "spatial_mode");
    const std::string mode = next_token(is, path);
    if (mode == "shared") traj.spatial_mode = SpatialPlanMode::shared;
    else if (mode == "per_frame") traj.spatial_mode = SpatialPlanMode::per_frame;
    else throw std::runtime_error("trajectory file: bad spatial_mode '" + mode + "'");
    expect(is, path, "blocks");
    const long n_blocks = next_long(is, path);
    for (long b = 0; b < n_blocks; ++b) {
        expect(is, path, "block");
        next_long(is, path);  // 1-based index, informational
        BlockTrace blk;
        expect(is, path, "t_in");
        blk.t_in = static_cast<int>(next_long(is, path));
        expect(is, path, "l_in");
        blk.l_in = static_cast<int>(next_long(is, path));
        expect(is, path, "t_out");
        blk.t_out = static_cast<int>(next_long(is, path));
        expect(is, path, "l_out");
        blk.l_out = static_cast<int>(next_long(is, path));
        expect(is, path, "temporal");
        blk.temporal_plan = read_plan(is, path);
        blk.temporal_candidates = read_candidates(is, path);
        expect(is, path, "spatial_plans");
        const long n_plans = next_long(is, path);
        for (long p = 0; p < n_plans; ++p) {
            expect(is, path, "spatial");
            blk.spatial_plans.push_back(read_plan(is, path));
        }
        blk.spatial_candidates = read_candidates(is, path);
        traj.blocks.push_back(std::move(blk));
    }
    return traj;
}

}  // namespace vta
