#pragma once

#include "qtenc/cu.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace qtenc {

// One coded CU of a finished partition tree; internal nodes carry their split
// mode, leaves carry NONE.
struct CuRecord {
    int x0 = 0;
    int y0 = 0;
    int width = 0;
    int height = 0;
    int depth = 0;
    PartitionMode best_mode = PartitionMode::NONE;
};

// Partition records of one frame, grouped per CTU in raster order.
class FramePartitionRecords {
public:
    FramePartitionRecords() = default;
    FramePartitionRecords(int frame_w, int frame_h, int ctu_size);

    void add_ctu(int ctu_x, int ctu_y, std::vector<CuRecord> records);
    bool ctu_done(int ctu_x, int ctu_y) const;

    // The record at exactly `depth` containing the sample, or the deepest
    // shallower one (a leaf) when the tree stopped early. Empty when the
    // point's CTU has not been coded or the point is off-frame.
    std::optional<CuRecord> resolve(int px, int py, int depth) const;

    // Depth of the leaf containing the sample.
    std::optional<int> leaf_depth(int px, int py) const;

    bool empty() const { return ctus_.empty(); }

private:
    int frame_w_ = 0, frame_h_ = 0, ctu_size_ = 0, ctus_wide_ = 0, ctus_high_ = 0;
    std::vector<std::vector<CuRecord>> ctus_;
    std::vector<bool> done_;
};

// Best-mode multiset of the spatial-temporal reference CU set: for each of the
// 8 unit offsets, the causal ones (left, top, top-left) contribute both the
// current-frame neighbor (when its CTU is coded) and the previous-frame
// co-located CU; the other five contribute the previous frame only. `prev`
// may be null.
std::vector<PartitionMode> build_ref_cus(const FramePartitionRecords& cur,
                                         const FramePartitionRecords* prev, const CuNode& cu);

// Candidate ordering and per-mode probabilities estimated from reference
// best-mode counts. Probabilities are occurrence fractions of |S_P|; split
// modes absent from the reference set get 0 and canonical order.
struct PartitionStats {
    std::array<double, 5> probability{}; // indexed by kSplitModes order
    double p_none = 0.0;                 // reference leaves (no split)
    int ref_count = 0;
    std::vector<PartitionMode> ordered;  // permutation of the 5 split modes

    double prob_of(PartitionMode m) const { return probability[std::size_t(m) - 1]; }
};

PartitionStats mode_probabilities(const std::vector<PartitionMode>& reference_best_modes);

// Running tally of how often the finally chosen split mode was inside /
// outside the reference set, per mode.
struct ModeCorrelationStats {
    std::array<std::int64_t, 5> chosen_count{};
    std::int64_t in_r_events = 0, in_r_hits = 0;
    std::int64_t out_r_events = 0, out_r_hits = 0;

    void add(const std::vector<PartitionMode>& reference_best_modes, PartitionMode chosen);
    void merge(const ModeCorrelationStats& other);

    double p_best_given_in_r() const {
        return in_r_events ? double(in_r_hits) / double(in_r_events) : 0.0;
    }
    double p_best_given_not_in_r() const {
        return out_r_events ? double(out_r_hits) / double(out_r_events) : 0.0;
    }
};

} // namespace qtenc
