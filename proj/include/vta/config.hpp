#pragma once

#include <string>
#include <vector>

#include "vta/encoder.hpp"

namespace vta {

// "key = value" per line; '#' starts a comment; unknown keys are rejected.
// Keys: frames, height, width, patch, dim, heads, blocks, rt, rs, strategy
// (importance|geometry), weighting (sized|pairwise), spatial_plan
// (shared|per_frame), seed, clamp (true|false).
struct ConfigParse {
    EncoderConfig config;
    std::vector<std::string> errors;  // parse problems and invariant violations

    bool ok() const { return errors.empty(); }
};

ConfigParse parse_config_text(const std::string& text);
ConfigParse load_config(const std::string& path);

// Canonical key=value rendering; parse(render(cfg)) == cfg.
std::string render_config(const EncoderConfig& cfg);

const char* to_string(Strategy s);
const char* to_string(MergeWeighting w);
const char* to_string(SpatialPlanMode m);

}  // namespace vta
