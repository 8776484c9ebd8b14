#include "qtenc/pipeline.hpp"

#include "qtenc/kernels.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace qtenc {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct CtuBlocks {
    int bx0, by0, bx1, by1; // half-open block range of the CTU inside the frame
};

CtuBlocks ctu_blocks(int ctu_x0, int ctu_y0, int ctu_size, int bw, int bh) {
    return CtuBlocks{ctu_x0 / 8, ctu_y0 / 8,
                     std::min((ctu_x0 + ctu_size) / 8, bw),
                     std::min((ctu_y0 + ctu_size) / 8, bh)};
}

} // namespace

const char* to_string(EncodeMode m) {
    switch (m) {
    case EncodeMode::ORACLE: return "oracle";
    case EncodeMode::DDFF_ONLY: return "ddff";
    case EncodeMode::PPBE_ONLY: return "ppbe";
    case EncodeMode::FULL: return "full";
    }
    return "?";
}

EncodeMode encode_mode_from_string(const std::string& s) {
    if (s == "oracle") return EncodeMode::ORACLE;
    if (s == "ddff") return EncodeMode::DDFF_ONLY;
    if (s == "ppbe") return EncodeMode::PPBE_ONLY;
    if (s == "full") return EncodeMode::FULL;
    throw std::invalid_argument("unknown encode mode: " + s);
}

double EncodeReport::global_psnr() const {
    double n = double(orig_width) * orig_height * frames.size();
    if (n <= 0.0 || total_distortion <= 0.0)
        return 99.0;
    return 10.0 * std::log10(255.0 * 255.0 * n / total_distortion);
}

EncodeReport encode_sequence(const std::vector<FramePlane>& frames, const EncodeConfig& cfg,
                             DatasetCollector* collector) {
    if (frames.empty())
        throw std::invalid_argument("encode_sequence: no frames");
    if (cfg.ctu_size != 32 && cfg.ctu_size != 64 && cfg.ctu_size != 128)
        throw std::invalid_argument("encode_sequence: ctu_size must be 32, 64 or 128");
    bool wants_ddff = cfg.mode == EncodeMode::DDFF_ONLY || cfg.mode == EncodeMode::FULL;
    if (wants_ddff && !cfg.model)
        throw std::invalid_argument("encode_sequence: mode requires a depth prediction model");

    const int fw = frames[0].width, fh = frames[0].height;
    const int bw = fw / 8, bh = fh / 8;
    const int ctus_wide = (fw + cfg.ctu_size - 1) / cfg.ctu_size;
    const int ctus_high = (fh + cfg.ctu_size - 1) / cfg.ctu_size;
    QpLambda qp = QpLambda::from_qp(cfg.qp);

    EncodeReport report;
    report.width = fw;
    report.height = fh;
    report.orig_width = frames[0].orig_width;
    report.orig_height = frames[0].orig_height;
    report.qp = cfg.qp;
    report.ctu_size = cfg.ctu_size;
    report.mode = cfg.mode;
    report.seed = cfg.seed;

    DepthGrid prev_grid;
    FramePartitionRecords prev_recs;
    bool have_prev = false;

    for (std::size_t t = 0; t < frames.size(); ++t) {
        const FramePlane& plane = frames[t];
        if (plane.width != fw || plane.height != fh)
            throw std::invalid_argument("encode_sequence: frame geometry changed mid-sequence");
        Clock::time_point frame_t0 = Clock::now();

        DepthGrid cur_grid(bw, bh);
        FramePartitionRecords cur_recs(fw, fh, cfg.ctu_size);
        FramePlane recon = plane; // overwritten leaf by leaf

        bool use_ddff = wants_ddff && t > 0;
        bool use_ppbe =
            (cfg.mode == EncodeMode::PPBE_ONLY || cfg.mode == EncodeMode::FULL) && t > 0;

        FrameStats fs;
        fs.index = int(t);
        std::vector<int> frame_depths(std::size_t(bw) * bh, 0);

        for (int cy = 0; cy < ctus_high; ++cy)
            for (int cx = 0; cx < ctus_wide; ++cx) {
                CuNode root{cx * cfg.ctu_size, cy * cfg.ctu_size, cfg.ctu_size, cfg.ctu_size,
                            0, false};
                CtuBlocks blocks = ctu_blocks(root.x0, root.y0, cfg.ctu_size, bw, bh);

                // Step 2: batched per-CTU depth prediction
                std::vector<std::uint8_t> adjusted(std::size_t(bw) * bh, 0); // this CTU only
                std::vector<RefDepthMap> maps;
                std::vector<std::size_t> map_block; // grid index per map
                if (use_ddff || (collector && t > 0)) {
                    for (int by = blocks.by0; by < blocks.by1; ++by)
                        for (int bx = blocks.bx0; bx < blocks.bx1; ++bx) {
                            maps.push_back(
                                build_ref_map(cur_grid, have_prev ? &prev_grid : nullptr, bx, by));
                            map_block.push_back(cur_grid.idx(bx, by));
                        }
                }
                if (use_ddff) {
                    Clock::time_point t0 = Clock::now();
                    std::vector<std::array<std::uint8_t, 25>> inputs;
                    std::vector<std::size_t> which;
                    for (std::size_t i = 0; i < maps.size(); ++i)
                        if (maps[i].complete) {
                            inputs.push_back(maps[i].depths());
                            which.push_back(i);
                        }
                    auto probs = ddff_forward_batch(*cfg.model, inputs);
                    for (std::size_t k = 0; k < which.size(); ++k) {
                        std::size_t i = which[k];
                        int predicted = ddff_argmax_depth(probs[k]);
                        cur_grid.predicted_depth[map_block[i]] = std::uint8_t(predicted);
                        adjusted[map_block[i]] = std::uint8_t(adjust_depth(predicted, maps[i]));
                    }
                    report.model_time_ms += ms_since(t0);
                }

                SearchHooks hooks;
                if (use_ddff) {
                    hooks.depth_cap = [&](const CuNode& cu) -> std::optional<int> {
                        std::vector<int> depths;
                        bool all_predicted = true;
                        for (int by = cu.y0 / 8; by < std::min((cu.y0 + cu.height) / 8, bh); ++by)
                            for (int bx = cu.x0 / 8; bx < std::min((cu.x0 + cu.width) / 8, bw);
                                 ++bx) {
                                std::uint8_t d = adjusted[cur_grid.idx(bx, by)];
                                if (d == 0)
                                    all_predicted = false;
                                else
                                    depths.push_back(d);
                            }
                        int d_o = optimal_cu_depth(depths);
                        if (all_predicted && d_o > 0)
                            return d_o;
                        // incomplete reference data: inherit the co-located
                        // depth of the previous frame
                        if (have_prev)
                            if (std::optional<int> d = prev_recs.leaf_depth(cu.x0, cu.y0))
                                return std::max(*d, 1);
                        return std::nullopt;
                    };
                }
                if (use_ppbe) {
                    hooks.early_stop = true;
                    hooks.mode_order = [&](const CuNode& cu) {
                        Clock::time_point t0 = Clock::now();
                        auto bms = build_ref_cus(cur_recs, have_prev ? &prev_recs : nullptr, cu);
                        auto order = mode_probabilities(bms).ordered;
                        report.model_time_ms += ms_since(t0);
                        return order;
                    };
                }

                CtuSearch search(plane, qp, hooks);
                PartitionTree tree = search.search(root);
                report.leaf_evals += search.leaf_evals();

                // commit: records, reconstruction, depth bookkeeping
                std::vector<CuRecord> records;
                visit_tree(tree, [&](const PartitionTree& node) {
                    records.push_back(CuRecord{node.cu.x0, node.cu.y0, node.cu.width,
                                               node.cu.height, node.cu.depth, node.mode});
                    if (node.is_leaf()) {
                        std::vector<std::uint8_t> rec;
                        cu_rd_cost(plane, node.cu, qp, &rec);
                        for (int y = 0; y < node.cu.height; ++y)
                            std::copy_n(rec.data() + std::size_t(y) * node.cu.width,
                                        node.cu.width,
                                        recon.samples.data() +
                                            std::size_t(node.cu.y0 + y) * fw + node.cu.x0);
                    }
                });
                {
                    Clock::time_point t0 = Clock::now();
                    for (const CuRecord& r : records)
                        if (r.best_mode != PartitionMode::NONE) {
                            CuNode cu{r.x0, r.y0, r.width, r.height, r.depth, false};
                            report.partition_stats.add(
                                build_ref_cus(cur_recs, have_prev ? &prev_recs : nullptr, cu),
                                r.best_mode);
                        }
                    if (use_ppbe)
                        report.model_time_ms += ms_since(t0);
                }
                cur_recs.add_ctu(cx, cy, std::move(records));

                depth_grid_of(tree, frame_depths, bw);
                for (int by = blocks.by0; by < blocks.by1; ++by)
                    for (int bx = blocks.bx0; bx < blocks.bx1; ++bx) {
                        std::size_t i = cur_grid.idx(bx, by);
                        cur_grid.final_depth[i] = std::uint8_t(frame_depths[i]);
                        if (cur_grid.predicted_depth[i] == 0)
                            cur_grid.predicted_depth[i] = cur_grid.final_depth[i];
                    }

                if (collector && t > 0)
                    for (std::size_t i = 0; i < maps.size(); ++i)
                        if (maps[i].complete)
                            collector->add(maps[i].depths(),
                                           int(cur_grid.final_depth[map_block[i]]));

                fs.distortion += tree.cost.distortion;
                fs.rate_bits += tree.cost.rate_bits;
                fs.j += tree.cost.j;
            }

        // PSNR over the pre-padding geometry
        std::uint64_t sse = 0;
        for (int y = 0; y < plane.orig_height; ++y)
            sse += kern::ops().sse_u8(plane.samples.data() + std::size_t(y) * fw,
                                      recon.samples.data() + std::size_t(y) * fw,
                                      std::size_t(plane.orig_width));
        double n = double(plane.orig_width) * plane.orig_height;
        fs.psnr = sse == 0 ? 99.0 : 10.0 * std::log10(255.0 * 255.0 * n / double(sse));
        fs.time_ms = ms_since(frame_t0);

        report.frames.push_back(fs);
        report.total_distortion += fs.distortion;
        report.total_rate_bits += fs.rate_bits;
        report.total_j += fs.j;
        report.total_time_ms += fs.time_ms;
        report.depth_grids.push_back(std::move(frame_depths));

        prev_grid = std::move(cur_grid);
        prev_recs = std::move(cur_recs);
        have_prev = true;
    }
    return report;
}

nlohmann::ordered_json report_to_json(const EncodeReport& r, bool include_timing) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["config"] = {{"qp", r.qp},
                   {"ctu_size", r.ctu_size},
                   {"mode", to_string(r.mode)},
                   {"seed", r.seed},
                   {"width", r.width},
                   {"height", r.height},
                   {"orig_width", r.orig_width},
                   {"orig_height", r.orig_height},
                   {"frame_count", r.frames.size()}};
    nlohmann::ordered_json frames = nlohmann::ordered_json::array();
    for (const FrameStats& f : r.frames) {
        nlohmann::ordered_json fj{{"index", f.index},
                                  {"distortion", f.distortion},
                                  {"rate_bits", f.rate_bits},
                                  {"j", f.j},
                                  {"psnr", f.psnr}};
        if (include_timing)
            fj["time_ms"] = f.time_ms;
        frames.push_back(std::move(fj));
    }
    j["frames"] = std::move(frames);
    j["totals"] = {{"distortion", r.total_distortion},
                   {"rate_bits", r.total_rate_bits},
                   {"j", r.total_j},
                   {"psnr", r.global_psnr()},
                   {"leaf_evals", r.leaf_evals}};
    if (include_timing) {
        j["totals"]["time_ms"] = r.total_time_ms;
        j["totals"]["model_time_ms"] = r.model_time_ms;
    }
    j["depth_grids"] = r.depth_grids;
    const ModeCorrelationStats& s = r.partition_stats;
    nlohmann::ordered_json counts;
    for (std::size_t i = 0; i < kSplitModes.size(); ++i)
        counts[to_string(kSplitModes[i])] = s.chosen_count[i];
    j["partition_stats"] = {{"chosen_counts", std::move(counts)},
                            {"in_r_events", s.in_r_events},
                            {"in_r_hits", s.in_r_hits},
                            {"out_r_events", s.out_r_events},
                            {"out_r_hits", s.out_r_hits},
                            {"p_best_given_in_r", s.p_best_given_in_r()},
                            {"p_best_given_not_in_r", s.p_best_given_not_in_r()}};
    return j;
}

} // namespace qtenc
