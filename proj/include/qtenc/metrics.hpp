#pragma once

#include "qtenc/ddff.hpp"
#include "qtenc/pipeline.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qtenc {

struct RdPoint {
    double rate = 0.0; // bits (any positive unit; scaling cancels in log space)
    double psnr = 0.0; // dB
};

// Average time saving over the Qp set, in percent:
//   (1/|F|) * sum_i (t_ori[i] - t_pro[i]) / t_ori[i] * 100
double ats(const std::vector<double>& t_ori, const std::vector<double>& t_pro);

// Bjontegaard delta bit rate in percent, classical formulation: cubic fit of
// log10(rate) against PSNR per curve, average the difference over the
// overlapping PSNR range, 10^delta - 1. Requires >= 4 points per curve.
double bdbr(std::vector<RdPoint> anchor, std::vector<RdPoint> test);

// Rows are true depth, columns predicted depth, both 1..6 mapped to 0..5.
struct ConfusionMatrix {
    std::array<std::array<std::int64_t, 6>, 6> counts{};

    void add(int true_depth, int predicted_depth) {
        ++counts[std::size_t(true_depth - 1)][std::size_t(predicted_depth - 1)];
    }
    std::int64_t total() const;
    std::int64_t diagonal() const;
};

ConfusionMatrix evaluate_model(const DdffModel& model, const std::vector<DepthSample>& samples);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double specificity = 0.0;
    double accuracy = 0.0;
};

struct ClassificationSummary {
    std::array<ClassMetrics, 6> per_class{};
    ClassMetrics macro;          // unweighted mean over classes with support
    double exact_accuracy = 0.0; // diagonal / total
};

// One-vs-rest metrics per depth class. Classes with no true and no predicted
// samples are excluded from the macro average.
ClassificationSummary classification_metrics(const ConfusionMatrix& cm);

// model_time / total_time * 100.
double overhead(double model_time, double total_time);

// Oracle-encodes the clip at every Qp and gathers one training pair per block
// with a complete reference map.
std::vector<DepthSample> collect_dataset(const std::vector<FramePlane>& frames,
                                         const std::vector<int>& qps);

struct BenchRun {
    EncodeReport anchor; // exhaustive search
    EncodeReport test;   // accelerated
};

struct BenchResult {
    std::vector<BenchRun> runs; // one per Qp, in the given order
    double ats_percent = 0.0;
    double bdbr_percent = 0.0;
    double overhead_percent = 0.0; // model time share of the accelerated runs
};

// A/B benchmark: the anchor is always the exhaustive search; `mode` selects
// the accelerated side. When `mode` needs the network but no model is given,
// the oracle run is reused as its own test side (ATS and BDBR are then 0 by
// construction). `jobs` > 1 runs the per-Qp encodes concurrently.
BenchResult run_bench(const std::vector<FramePlane>& frames, const DdffModel* model,
                      EncodeMode mode, const std::vector<int>& qps, int jobs = 1,
                      std::uint64_t seed = 0);

nlohmann::ordered_json bench_to_json(const BenchResult& result, bool include_timing);

// Plot-ready per-run rows: qp, mode, time_ms, j, psnr, rate_bits.
std::string bench_to_csv(const BenchResult& result);

} // namespace qtenc
