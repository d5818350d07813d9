#include "vta/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace vta {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_int(const std::string& v, long& out) {
    try {
        size_t pos = 0;
        out = std::stol(v, &pos);
        return pos == v.size();
    } catch (...) {
        return false;
    }
}

}  // namespace

const char* to_string(Strategy s) {
    return s == Strategy::importance ? "importance" : "geometry";
}
const char* to_string(MergeWeighting w) {
    return w == MergeWeighting::sized ? "sized" : "pairwise";
}
const char* to_string(SpatialPlanMode m) {
    return m == SpatialPlanMode::shared ? "shared" : "per_frame";
}

ConfigParse parse_config_text(const std::string& text) {
    ConfigParse out;
    EncoderConfig& cfg = out.config;
    std::vector<std::string> seen;

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            out.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            out.errors.push_back(key + ": duplicate key");
            continue;
        }
        seen.push_back(key);

        auto int_field = [&](int& dst) {
            long v;
            if (!parse_int(val, v))
                out.errors.push_back(key + ": not an integer: '" + val + "'");
            else
                dst = static_cast<int>(v);
        };
        if (key == "frames") int_field(cfg.frames);
        else if (key == "height") int_field(cfg.height);
        else if (key == "width") int_field(cfg.width);
        else if (key == "patch") int_field(cfg.patch);
        else if (key == "dim") int_field(cfg.dim);
        else if (key == "heads") int_field(cfg.heads);
        else if (key == "blocks") int_field(cfg.blocks);
        else if (key == "rt") int_field(cfg.reduce_t);
        else if (key == "rs") int_field(cfg.reduce_s);
        else if (key == "seed") {
            long v;
            if (!parse_int(val, v) || v < 0)
                out.errors.push_back("seed: not a non-negative integer: '" + val + "'");
            else
                cfg.seed = static_cast<uint32_t>(v);
        } else if (key == "strategy") {
            if (val == "importance") cfg.strategy = Strategy::importance;
            else if (val == "geometry") cfg.strategy = Strategy::geometry;
            else out.errors.push_back("strategy: expected importance|geometry, got '" + val + "'");
        } else if (key == "weighting") {
            if (val == "sized") cfg.weighting = MergeWeighting::sized;
            else if (val == "pairwise") cfg.weighting = MergeWeighting::pairwise;
            else out.errors.push_back("weighting: expected sized|pairwise, got '" + val + "'");
        } else if (key == "spatial_plan") {
            if (val == "shared") cfg.spatial_plan = SpatialPlanMode::shared;
            else if (val == "per_frame") cfg.spatial_plan = SpatialPlanMode::per_frame;
            else out.errors.push_back("spatial_plan: expected shared|per_frame, got '" + val + "'");
        } else if (key == "clamp") {
            if (val == "true" || val == "1") cfg.clamp = true;
            else if (val == "false" || val == "0") cfg.clamp = false;
            else out.errors.push_back("clamp: expected true|false, got '" + val + "'");
        } else {
            out.errors.push_back(key + ": unknown key");
        }
    }

    for (const char* req : {"frames", "height", "width", "dim", "heads", "blocks"})
        if (std::find(seen.begin(), seen.end(), req) == seen.end())
            out.errors.push_back(std::string(req) + ": required key missing");

    if (out.errors.empty()) {
        const auto invariant_errs = cfg.validate();
        out.errors.insert(out.errors.end(), invariant_errs.begin(), invariant_errs.end());
    }
    return out;
}

ConfigParse load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        ConfigParse out;
        out.errors.push_back("cannot open config file: " + path);
        return out;
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

std::string render_config(const EncoderConfig& cfg) {
    std::ostringstream os;
    os << "frames = " << cfg.frames << "\n"
       << "height = " << cfg.height << "\n"
       << "width = " << cfg.width << "\n"
       << "patch = " << cfg.patch << "\n"
       << "dim = " << cfg.dim << "\n"
       << "heads = " << cfg.heads << "\n"
       << "blocks = " << cfg.blocks << "\n"
       << "rt = " << cfg.reduce_t << "\n"
       << "rs = " << cfg.reduce_s << "\n"
       << "strategy = " << to_string(cfg.strategy) << "\n"
       << "weighting = " << to_string(cfg.weighting) << "\n"
       << "spatial_plan = " << to_string(cfg.spatial_plan) << "\n"
       << "seed = " << cfg.seed << "\n"
       << "clamp = " << (cfg.clamp ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace vta
