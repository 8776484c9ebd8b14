#pragma once

#include "qtenc/ddff.hpp"
#include "qtenc/frame.hpp"
#include "qtenc/intra.hpp"
#include "qtenc/ppbe.hpp"
#include "qtenc/qtmt.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qtenc {

enum class EncodeMode { ORACLE, DDFF_ONLY, PPBE_ONLY, FULL };

const char* to_string(EncodeMode m);
EncodeMode encode_mode_from_string(const std::string& s);

struct EncodeConfig {
    int qp = 32;
    int ctu_size = 128; // one of 32, 64, 128
    EncodeMode mode = EncodeMode::ORACLE;
    const DdffModel* model = nullptr; // required for DDFF_ONLY and FULL
    std::uint64_t seed = 0;
};

struct FrameStats {
    int index = 0;
    double distortion = 0.0;
    double rate_bits = 0.0;
    double j = 0.0;
    double psnr = 0.0;
    double time_ms = 0.0;
};

struct EncodeReport {
    int width = 0, height = 0;       // padded geometry
    int orig_width = 0, orig_height = 0;
    int qp = 0;
    int ctu_size = 0;
    EncodeMode mode = EncodeMode::ORACLE;
    std::uint64_t seed = 0;

    std::vector<FrameStats> frames;
    double total_distortion = 0.0;
    double total_rate_bits = 0.0;
    double total_j = 0.0;
    double total_time_ms = 0.0;
    double model_time_ms = 0.0; // depth prediction + adjustment + mode ordering
    std::size_t leaf_evals = 0;

    std::vector<std::vector<int>> depth_grids; // per frame, bw x bh
    ModeCorrelationStats partition_stats;

    double global_psnr() const;
};

// Captures (reference map, final depth) pairs while a sequence is encoded.
class DatasetCollector {
public:
    const std::vector<DepthSample>& samples() const { return samples_; }
    void add(const std::array<std::uint8_t, 25>& depths, int label) {
        samples_.push_back(DepthSample{depths, std::uint8_t(label)});
    }

private:
    std::vector<DepthSample> samples_;
};

// Frame loop: the first frame is always coded with the exhaustive search;
// later frames arm the hooks selected by cfg.mode. When `collector` is given,
// every block with a complete reference map contributes a training pair.
EncodeReport encode_sequence(const std::vector<FramePlane>& frames, const EncodeConfig& cfg,
                             DatasetCollector* collector = nullptr);

// Stable-schema JSON serialization; timing fields are dropped when
// include_timing is false so reports can be compared byte-for-byte.
nlohmann::ordered_json report_to_json(const EncodeReport& report, bool include_timing);

} // namespace qtenc
