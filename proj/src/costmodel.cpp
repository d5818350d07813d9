#include "vta/costmodel.hpp"

#include <sstream>

namespace vta {

namespace {

FlopReport finish(std::vector<BlockFlops> blocks) {
    FlopReport rep;
    rep.blocks = std::move(blocks);
    for (const auto& b : rep.blocks) {
        rep.totals.temporal_qkv += b.temporal_qkv;
        rep.totals.temporal_scores += b.temporal_scores;
        rep.totals.temporal_values += b.temporal_values;
        rep.totals.spatial_qkv += b.spatial_qkv;
        rep.totals.spatial_scores += b.spatial_scores;
        rep.totals.spatial_values += b.spatial_values;
        rep.totals.ffn += b.ffn;
        rep.totals.similarity_overhead += b.similarity_overhead;
        rep.total += b.total();
    }
    return rep;
}

}  // namespace

FlopReport flops_divided(const EncoderConfig& cfg) {
    const uint64_t d = static_cast<uint64_t>(cfg.dim);
    std::vector<BlockFlops> blocks;
    for (const ScheduleEntry& e : predicted_schedule(cfg)) {
        const uint64_t t = static_cast<uint64_t>(e.t_in);
        const uint64_t l = static_cast<uint64_t>(e.l_in);
        BlockFlops b;
        b.t = e.t_in;
        b.l = e.l_in;
        b.temporal_qkv = 8 * t * l * d * d;
        b.temporal_scores = 2 * l * t * t * d;
        b.temporal_values = 2 * l * t * t * d;
        b.spatial_qkv = 8 * t * l * d * d;
        b.spatial_scores = 2 * t * l * l * d;
        b.spatial_values = 2 * t * l * l * d;
        b.ffn = 16 * t * l * d * d;
        if (e.rt_eff > 0) b.similarity_overhead += t * t * d;
        if (e.rs_eff > 0) b.similarity_overhead += l * l * d;
        blocks.push_back(b);
    }
    return finish(std::move(blocks));
}

FlopReport flops_joint(const EncoderConfig& cfg) {
    const uint64_t d = static_cast<uint64_t>(cfg.dim);
    std::vector<BlockFlops> blocks;
    for (const ScheduleEntry& e : predicted_schedule(cfg)) {
        const uint64_t n = static_cast<uint64_t>(e.t_in) * static_cast<uint64_t>(e.l_in);
        BlockFlops b;
        b.t = e.t_in;
        b.l = e.l_in;
        // single joint attention sublayer; reported in the spatial columns
        b.spatial_qkv = 8 * n * d * d;
        b.spatial_scores = 2 * n * n * d;
        b.spatial_values = 2 * n * n * d;
        b.ffn = 16 * n * d * d;
        if (e.rt_eff > 0 || e.rs_eff > 0) b.similarity_overhead += n * n * d;
        blocks.push_back(b);
    }
    return finish(std::move(blocks));
}

std::vector<SweepPoint> sweep(const EncoderConfig& cfg, std::span<const int> rt_values,
                              std::span<const int> rs_values) {
    std::vector<SweepPoint> out;
    out.reserve(rt_values.size() * rs_values.size());
    for (int rt : rt_values) {
        for (int rs : rs_values) {
            EncoderConfig c = cfg;
            c.reduce_t = rt;
            c.reduce_s = rs;
            c.clamp = true;  // sweeps may cross the schedule boundary
            out.push_back({rt, rs, flops_divided(c)});
        }
    }
    return out;
}

std::string flops_csv_header() {
    return "frames,height,width,patch,dim,heads,blocks,rt,rs,"
           "temporal_qkv,temporal_scores,temporal_values,"
           "spatial_qkv,spatial_scores,spatial_values,ffn,similarity_overhead,total";
}

std::string sweep_csv(const EncoderConfig& cfg, const std::vector<SweepPoint>& points) {
    std::ostringstream os;
    os << flops_csv_header() << "\n";
    for (const auto& p : points) {
        const BlockFlops& t = p.report.totals;
        os << cfg.frames << ',' << cfg.height << ',' << cfg.width << ',' << cfg.patch << ','
           << cfg.dim << ',' << cfg.heads << ',' << cfg.blocks << ',' << p.rt << ',' << p.rs
           << ',' << t.temporal_qkv << ',' << t.temporal_scores << ',' << t.temporal_values
           << ',' << t.spatial_qkv << ',' << t.spatial_scores << ',' << t.spatial_values << ','
           << t.ffn << ',' << t.similarity_overhead << ',' << p.report.total << "\n";
    }
    return os.str();
}

}  // namespace vta
