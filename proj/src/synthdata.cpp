#include "vta/synthdata.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vta/rng.hpp"

namespace vta {

int PlantedSpec::num_segments() const {
    int n = 0;
    for (int s : frame_segment) n = std::max(n, s + 1);
    return n;
}

int PlantedSpec::num_regions() const {
    int n = 0;
    for (int r : tile_region) n = std::max(n, r + 1);
    return n;
}

PlantedSpec make_planted_spec(int frames, int segments, int tiles_x, int tiles_y, int regions_x,
                              int regions_y, float noise, uint32_t seed) {
    if (frames < 1 || segments < 1 || segments > frames)
        throw std::invalid_argument("make_planted_spec: need 1 <= segments <= frames");
    if (tiles_x < 1 || tiles_y < 1 || regions_x < 1 || regions_y < 1 || regions_x > tiles_x ||
        regions_y > tiles_y)
        throw std::invalid_argument("make_planted_spec: bad region grid");
    if (noise < 0.0f) throw std::invalid_argument("make_planted_spec: noise must be >= 0");

    PlantedSpec spec;
    spec.tiles_x = tiles_x;
    spec.tiles_y = tiles_y;
    spec.noise = noise;
    spec.frame_segment.resize(frames);
    for (int t = 0; t < frames; ++t)
        spec.frame_segment[t] = std::min(t * segments / frames, segments - 1);
    spec.tile_region.resize(static_cast<size_t>(tiles_x) * tiles_y);
    for (int ty = 0; ty < tiles_y; ++ty) {
        const int ry = std::min(ty * regions_y / tiles_y, regions_y - 1);
        for (int tx = 0; tx < tiles_x; ++tx) {
            const int rx = std::min(tx * regions_x / tiles_x, regions_x - 1);
            spec.tile_region[static_cast<size_t>(ty) * tiles_x + tx] = ry * regions_x + rx;
        }
    }

    std::mt19937 g(seed);
    spec.colors.resize(static_cast<size_t>(segments) * regions_x * regions_y);
    for (auto& c : spec.colors)
        for (float& v : c) v = 0.1f + 0.8f * uniform_float(g);
    return spec;
}

RawVideo generate(const PlantedSpec& spec, int height, int width, uint32_t seed) {
    const int frames = static_cast<int>(spec.frame_segment.size());
    if (spec.tiles_x < 1 || height % spec.tiles_y != 0 || width % spec.tiles_x != 0)
        throw std::invalid_argument("generate: frame size not divisible into the tile grid");
    const int tile_h = height / spec.tiles_y;
    const int tile_w = width / spec.tiles_x;

    RawVideo v(frames, height, width);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < frames; ++t) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const int tile = (y / tile_h) * spec.tiles_x + (x / tile_w);
                const auto& color = spec.colors[spec.cluster_of(t, tile)];
                for (int c = 0; c < 3; ++c) {
                    float val = color[c];
                    if (spec.noise > 0.0f) {
                        const uint32_t ctr = hash_u32(seed) ^
                                             (static_cast<uint32_t>(t) * 0x9e3779b9u) ^
                                             (static_cast<uint32_t>(y) * 0x85ebca6bu) ^
                                             (static_cast<uint32_t>(x) * 0xc2b2ae35u) ^
                                             static_cast<uint32_t>(c);
                        val += spec.noise * (2.0f * hash_unit_float(ctr) - 1.0f);
                    }
                    v.at(t, y, x, c) = std::clamp(val, 0.0f, 1.0f);
                }
            }
        }
    }
    return v;
}

double score_purity(const GroupMap& groups, const PlantedSpec& truth) {
    const int tiles = static_cast<int>(truth.tile_region.size());
    if (groups.patches != tiles || groups.frames != static_cast<int>(truth.frame_segment.size()))
        throw std::invalid_argument("score_purity: group map does not match the planted spec");

    const int n_clusters = truth.num_segments() * truth.num_regions();
    double majority_sum = 0.0;
    size_t cell_count = 0;
    std::vector<int> counts(n_clusters);
    for (const auto& group : groups.groups) {
        std::fill(counts.begin(), counts.end(), 0);
        for (const auto& [t, l] : group) ++counts[truth.cluster_of(t, l)];
        majority_sum += *std::max_element(counts.begin(), counts.end());
        cell_count += group.size();
    }
    return majority_sum / static_cast<double>(cell_count);
}

void write_truth(const PlantedSpec& spec, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << "VTATRUTH 1\n";
    os << "frames " << spec.frame_segment.size() << "\n";
    os << "tiles " << spec.tiles_x << " " << spec.tiles_y << "\n";
    os << "noise " << spec.noise << "\n";
    os << "frame_segment";
    for (int s : spec.frame_segment) os << " " << s;
    os << "\ntile_region";
    for (int r : spec.tile_region) os << " " << r;
    os << "\ncolors " << spec.colors.size() << "\n";
    for (const auto& c : spec.colors) os << c[0] << " " << c[1] << " " << c[2] << "\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

PlantedSpec read_truth(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::string tok;
    auto expect = [&](const char* want) {
        if (!(is >> tok) || tok != want)
            throw std::runtime_error("truth file: expected '" + std::string(want) + "': " + path);
    };
    expect("VTATRUTH");
    int version;
    is >> version;
    if (version != 1) throw std::runtime_error("truth file: unknown version: " + path);
    PlantedSpec spec;
    expect("frames");
    size_t frames;
    is >> frames;
    expect("tiles");
    is >> spec.tiles_x >> spec.tiles_y;
    expect("noise");
    is >> spec.noise;
    expect("frame_segment");
    spec.frame_segment.resize(frames);
    for (auto& s : spec.frame_segment) is >> s;
    expect("tile_region");
    spec.tile_region.resize(static_cast<size_t>(spec.tiles_x) * spec.tiles_y);
    for (auto& r : spec.tile_region) is >> r;
    expect("colors");
    size_t n_colors;
    is >> n_colors;
    spec.colors.resize(n_colors);
    for (auto& c : spec.colors) is >> c[0] >> c[1] >> c[2];
    if (!is) throw std::runtime_error("truth file: truncated: " + path);
    return spec;
}

}  // namespace vta
