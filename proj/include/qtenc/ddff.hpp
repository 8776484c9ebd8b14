#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qtenc {

// Per-frame lattice of 8x8-block depths. A cell is valid once its CTU has
// finished coding (final) or once the predictor ran for it (predicted).
struct DepthGrid {
    int blocks_wide = 0;
    int blocks_high = 0;
    std::vector<std::uint8_t> final_depth;     // 0 = unset, else 1..6
    std::vector<std::uint8_t> predicted_depth; // 0 = unset, else 1..6

    DepthGrid() = default;
    DepthGrid(int bw, int bh)
        : blocks_wide(bw), blocks_high(bh),
          final_depth(std::size_t(bw) * bh, 0),
          predicted_depth(std::size_t(bw) * bh, 0) {}

    bool in_range(int bx, int by) const {
        return bx >= 0 && by >= 0 && bx < blocks_wide && by < blocks_high;
    }
    std::size_t idx(int bx, int by) const { return std::size_t(by) * blocks_wide + bx; }
};

// 5x5 spatial-temporal reference depth map around one block. Entries are
// ordered row-major over (dy, dx) in [-2,2]^2.
struct RefCell {
    std::uint8_t final_d = 0;
    std::uint8_t predicted_d = 0; // 0 when no prediction was made for the cell
    bool from_prev_frame = false;
};

struct RefDepthMap {
    std::array<RefCell, 25> cells{};
    bool complete = false;

    std::array<std::uint8_t, 25> depths() const {
        std::array<std::uint8_t, 25> d{};
        for (int i = 0; i < 25; ++i) d[i] = cells[i].final_d;
        return d;
    }
};

// Causal neighbors come from the current frame when already coded, otherwise
// from the co-located block of the previous frame; non-causal neighbors come
// from the previous frame only. Any unresolvable cell marks the map
// incomplete. `prev` is null for the first frame.
RefDepthMap build_ref_map(const DepthGrid& cur, const DepthGrid* prev, int bx, int by);

// Two-path fusion network: a 1x1->8 promotion followed by a same-padded
// 3x3 conv with ReLU, in parallel with a 1x1->4 conv; concatenated to a
// 12x5x5 tensor, flattened channel-major to 300, then 300-64-32-6 dense
// layers and softmax over depths 1..6 (class index = depth - 1).
struct DdffModel {
    std::vector<double> conv_a1_w, conv_a1_b; // 8,      8
    std::vector<double> conv_a2_w, conv_a2_b; // 8*8*3*3, 8   [out][in][ky][kx]
    std::vector<double> conv_b_w, conv_b_b;   // 4,      4
    std::vector<double> fc1_w, fc1_b;         // 64*300, 64   [out][in]
    std::vector<double> fc2_w, fc2_b;         // 32*64,  32
    std::vector<double> fc3_w, fc3_b;         // 6*32,   6

    static DdffModel zeros();
    static DdffModel xavier_init(std::uint64_t seed);

    std::vector<std::pair<std::vector<double>*, std::string>> params();
    std::vector<std::pair<const std::vector<double>*, std::string>> params() const;

    void save(const std::string& path) const;
    static DdffModel load(const std::string& path);
};

// Softmax probabilities over the 6 depth classes for a batch of 25-entry
// depth maps (values 1..6, normalized by /6 internally).
std::vector<std::array<double, 6>>
ddff_forward_batch(const DdffModel& model, const std::vector<std::array<std::uint8_t, 25>>& maps);

// Single-map convenience; the map must be complete.
std::array<double, 6> ddff_forward(const DdffModel& model, const RefDepthMap& map);

// Predicted depth in 1..6; ties broken toward the shallower depth.
int ddff_argmax_depth(const std::array<double, 6>& probs);

struct DepthSample {
    std::array<std::uint8_t, 25> depths{};
    std::uint8_t label = 1; // 1..6
};

// Mean cross-entropy of the batch; when `grad` is non-null it receives
// d(loss)/d(param) in a shape-identical model.
double ddff_loss_and_grad(const DdffModel& model, const std::vector<DepthSample>& batch,
                          DdffModel* grad);

struct TrainConfig {
    int batch_size = 256;
    int iters_per_epoch = 128;
    int epochs = 50;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct TrainMetrics {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double final_loss = 0.0;
    int epochs_run = 0;
};

// Seeded Adam training over a 4:1 train/test split of the dataset.
// `target_test_accuracy`, when positive, stops training at the end of the
// first epoch reaching it.
TrainMetrics ddff_train(DdffModel& model, const std::vector<DepthSample>& dataset,
                        const TrainConfig& cfg, std::uint64_t seed,
                        double target_test_accuracy = 0.0);

double ddff_accuracy(const DdffModel& model, const std::vector<DepthSample>& samples);

// Per-CU depth estimate: the maximum adjusted depth over the CU's 8x8
// blocks. Empty input yields 0 (no estimate).
int optimal_cu_depth(const std::vector<int>& block_depths);

// Eq-style conservative adjustment: the predicted depth plus the clamped
// rounded-down mean of the reference blocks' (final - predicted) errors,
// never below the raw prediction, clamped to [1,6]. References without a
// prediction contribute error 0.
int adjust_depth(int predicted, const RefDepthMap& map);

// Dataset file: "DDS1", u64 record count, then 26-byte records.
void save_dataset(const std::string& path, const std::vector<DepthSample>& samples);
std::vector<DepthSample> load_dataset(const std::string& path);

// Deterministic 4:1 split used by training and evaluation.
void split_dataset(const std::vector<DepthSample>& all, std::uint64_t seed,
                   std::vector<DepthSample>& train, std::vector<DepthSample>& test);

} // namespace qtenc
