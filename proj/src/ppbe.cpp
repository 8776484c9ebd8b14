#include "qtenc/ppbe.hpp"

#include <algorithm>

namespace qtenc {

FramePartitionRecords::FramePartitionRecords(int frame_w, int frame_h, int ctu_size)
    : frame_w_(frame_w), frame_h_(frame_h), ctu_size_(ctu_size),
      ctus_wide_((frame_w + ctu_size - 1) / ctu_size),
      ctus_high_((frame_h + ctu_size - 1) / ctu_size),
      ctus_(std::size_t(ctus_wide_) * ctus_high_),
      done_(std::size_t(ctus_wide_) * ctus_high_, false) {}

void FramePartitionRecords::add_ctu(int ctu_x, int ctu_y, std::vector<CuRecord> records) {
    std::size_t i = std::size_t(ctu_y) * ctus_wide_ + ctu_x;
    ctus_[i] = std::move(records);
    done_[i] = true;
}

bool FramePartitionRecords::ctu_done(int ctu_x, int ctu_y) const {
    if (ctu_x < 0 || ctu_y < 0 || ctu_x >= ctus_wide_ || ctu_y >= ctus_high_)
        return false;
    return done_[std::size_t(ctu_y) * ctus_wide_ + ctu_x];
}

std::optional<CuRecord> FramePartitionRecords::resolve(int px, int py, int depth) const {
    if (px < 0 || py < 0 || px >= frame_w_ || py >= frame_h_ || ctus_.empty())
        return std::nullopt;
    int cx = px / ctu_size_, cy = py / ctu_size_;
    if (!ctu_done(cx, cy))
        return std::nullopt;
    const std::vector<CuRecord>& records = ctus_[std::size_t(cy) * ctus_wide_ + cx];
    std::optional<CuRecord> best;
    for (const CuRecord& r : records) {
        if (px < r.x0 || py < r.y0 || px >= r.x0 + r.width || py >= r.y0 + r.height)
            continue;
        if (r.depth > depth)
            continue;
        if (!best || r.depth > best->depth)
            best = r;
    }
    return best;
}

std::optional<int> FramePartitionRecords::leaf_depth(int px, int py) const {
    std::optional<CuRecord> r = resolve(px, py, kMaxDepth);
    if (!r)
        return std::nullopt;
    return r->depth;
}

std::vector<PartitionMode> build_ref_cus(const FramePartitionRecords& cur,
                                         const FramePartitionRecords* prev, const CuNode& cu) {
    std::vector<PartitionMode> out;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0)
                continue;
            int px = dx < 0 ? cu.x0 - 1 : dx > 0 ? cu.x0 + cu.width : cu.x0 + cu.width / 2;
            int py = dy < 0 ? cu.y0 - 1 : dy > 0 ? cu.y0 + cu.height : cu.y0 + cu.height / 2;
            bool causal = dx <= 0 && dy <= 0;
            if (causal) {
                if (std::optional<CuRecord> r = cur.resolve(px, py, cu.depth))
                    out.push_back(r->best_mode);
            }
            if (prev) {
                if (std::optional<CuRecord> r = prev->resolve(px, py, cu.depth))
                    out.push_back(r->best_mode);
            }
        }
    return out;
}

PartitionStats mode_probabilities(const std::vector<PartitionMode>& reference_best_modes) {
    PartitionStats stats;
    stats.ref_count = int(reference_best_modes.size());
    std::array<int, 5> counts{};
    int none_count = 0;
    for (PartitionMode m : reference_best_modes) {
        if (m == PartitionMode::NONE)
            ++none_count;
        else
            ++counts[std::size_t(m) - 1];
    }
    if (stats.ref_count > 0) {
        for (int i = 0; i < 5; ++i)
            stats.probability[i] = double(counts[i]) / double(stats.ref_count);
        stats.p_none = double(none_count) / double(stats.ref_count);
    }
    stats.ordered.assign(kSplitModes.begin(), kSplitModes.end());
    std::stable_sort(stats.ordered.begin(), stats.ordered.end(),
                     [&](PartitionMode a, PartitionMode b) {
                         return counts[std::size_t(a) - 1] > counts[std::size_t(b) - 1];
                     });
    return stats;
}

void ModeCorrelationStats::add(const std::vector<PartitionMode>& reference_best_modes,
                               PartitionMode chosen) {
    if (chosen == PartitionMode::NONE)
        return;
    ++chosen_count[std::size_t(chosen) - 1];
    std::array<bool, 5> in_r{};
    for (PartitionMode m : reference_best_modes)
        if (m != PartitionMode::NONE)
            in_r[std::size_t(m) - 1] = true;
    for (std::size_t i = 0; i < 5; ++i) {
        bool hit = std::size_t(chosen) - 1 == i;
        if (in_r[i]) {
            ++in_r_events;
            in_r_hits += hit;
        } else {
            ++out_r_events;
            out_r_hits += hit;
        }
    }
}

void ModeCorrelationStats::merge(const ModeCorrelationStats& other) {
    for (std::size_t i = 0; i < 5; ++i)
        chosen_count[i] += other.chosen_count[i];
    in_r_events += other.in_r_events;
    in_r_hits += other.in_r_hits;
    out_r_events += other.out_r_events;
    out_r_hits += other.out_r_hits;
}

} // namespace qtenc
