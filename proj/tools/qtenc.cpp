#include "qtenc/metrics.hpp"
#include "qtenc/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

// Bad flag values and unreadable inputs are usage problems (exit 2), distinct
// from runtime failures (exit 1).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<qtenc::FramePlane> load_input(const std::string& path, int width, int height,
                                          int frames) {
    if (!std::ifstream(path, std::ios::binary))
        throw UsageError("cannot open input file: " + path);
    if (path.size() > 4 && path.substr(path.size() - 4) == ".pgm") {
        std::vector<qtenc::FramePlane> v{qtenc::load_pgm(path)};
        return v;
    }
    if (width <= 0 || height <= 0)
        throw UsageError("YUV input needs positive --width and --height");
    return qtenc::load_yuv(path, width, height, frames);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << text;
}

int run(int argc, char** argv) {
    CLI::App app{"QTMT intra partition search with learned fast-decision modes"};
    app.require_subcommand(1);

    // shared input flags
    struct InputArgs {
        std::string input;
        int width = 0, height = 0, frames = 0;
    };

    auto add_input = [](CLI::App* cmd, InputArgs& in) {
        cmd->add_option("--input", in.input, "raw 4:2:0 YUV or binary PGM file")->required();
        cmd->add_option("--width", in.width, "luma width (YUV input)");
        cmd->add_option("--height", in.height, "luma height (YUV input)");
        cmd->add_option("--frames", in.frames, "frame-count cap, 0 = all")->default_val(0);
    };

    // encode
    auto* enc = app.add_subcommand("encode", "encode a clip with one search mode");
    InputArgs enc_in;
    add_input(enc, enc_in);
    int enc_qp = 32, enc_ctu = 128;
    std::string enc_mode = "oracle", enc_model, enc_report;
    std::uint64_t enc_seed = 0;
    bool enc_no_timing = false;
    enc->add_option("--qp", enc_qp, "quantization parameter")->default_val(32);
    enc->add_option("--ctu", enc_ctu, "CTU size (32, 64 or 128)")->default_val(128);
    enc->add_option("--mode", enc_mode, "oracle | ddff | ppbe | full")->default_val("oracle");
    enc->add_option("--model", enc_model, "trained weights file (ddff/full modes)");
    enc->add_option("--report", enc_report, "JSON report output path");
    enc->add_option("--seed", enc_seed, "run seed recorded in the report")->default_val(0);
    enc->add_flag("--no-timing", enc_no_timing, "omit wall-clock fields from the report");

    // collect
    auto* col = app.add_subcommand("collect", "oracle-encode and dump depth training pairs");
    InputArgs col_in;
    add_input(col, col_in);
    std::vector<int> col_qps{22, 27, 32, 37};
    std::string col_out;
    col->add_option("--qps", col_qps, "Qp list")->delimiter(',');
    col->add_option("--out", col_out, "dataset output path (.dds)")->required();

    // train
    auto* tr = app.add_subcommand("train", "train the depth prediction network");
    std::string tr_data, tr_out;
    std::uint64_t tr_seed = 1;
    int tr_epochs = 50;
    tr->add_option("--data", tr_data, "dataset file (.dds)")->required();
    tr->add_option("--out", tr_out, "weights output path (.ddff)")->required();
    tr->add_option("--seed", tr_seed, "training seed")->default_val(1);
    tr->add_option("--epochs", tr_epochs, "epoch count")->default_val(50);

    // eval-model
    auto* ev = app.add_subcommand("eval-model", "confusion matrix and per-class metrics");
    std::string ev_data, ev_model;
    ev->add_option("--data", ev_data, "dataset file (.dds)")->required();
    ev->add_option("--model", ev_model, "weights file (.ddff)")->required();

    // bench
    auto* be = app.add_subcommand("bench", "A/B benchmark: exhaustive vs accelerated");
    InputArgs be_in;
    add_input(be, be_in);
    std::vector<int> be_qps{22, 27, 32, 37};
    std::string be_model, be_report, be_csv, be_mode = "full";
    int be_jobs = 1, be_ctu = 128;
    std::uint64_t be_seed = 0;
    bool be_no_timing = false;
    be->add_option("--qps", be_qps, "Qp list")->delimiter(',');
    be->add_option("--model", be_model, "weights file; without it ATS/BDBR report 0");
    be->add_option("--mode", be_mode, "accelerated mode: ddff | ppbe | full")->default_val("full");
    be->add_option("--ctu", be_ctu, "CTU size")->default_val(128);
    be->add_option("--report", be_report, "JSON report output path");
    be->add_option("--csv", be_csv, "plot-ready CSV output path");
    be->add_option("--jobs", be_jobs, "concurrent per-Qp encodes")->default_val(1);
    be->add_option("--seed", be_seed, "run seed recorded in the report")->default_val(0);
    be->add_flag("--no-timing", be_no_timing, "omit wall-clock fields from the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*enc) {
        auto frames = load_input(enc_in.input, enc_in.width, enc_in.height, enc_in.frames);
        qtenc::DdffModel model;
        qtenc::EncodeConfig cfg;
        cfg.qp = enc_qp;
        cfg.ctu_size = enc_ctu;
        cfg.mode = qtenc::encode_mode_from_string(enc_mode);
        cfg.seed = enc_seed;
        if (!enc_model.empty()) {
            model = qtenc::DdffModel::load(enc_model);
            cfg.model = &model;
        }
        qtenc::EncodeReport report = qtenc::encode_sequence(frames, cfg);
        std::string json = qtenc::report_to_json(report, !enc_no_timing).dump(2) + "\n";
        if (!enc_report.empty())
            write_text(enc_report, json);
        std::printf("mode=%s qp=%d frames=%zu j=%.2f psnr=%.4f rate=%.0f\n",
                    qtenc::to_string(report.mode), report.qp, report.frames.size(),
                    report.total_j, report.global_psnr(), report.total_rate_bits);
    } else if (*col) {
        auto frames = load_input(col_in.input, col_in.width, col_in.height, col_in.frames);
        auto samples = qtenc::collect_dataset(frames, col_qps);
        qtenc::save_dataset(col_out, samples);
        std::printf("wrote %zu records to %s\n", samples.size(), col_out.c_str());
    } else if (*tr) {
        auto dataset = qtenc::load_dataset(tr_data);
        qtenc::DdffModel model = qtenc::DdffModel::xavier_init(tr_seed);
        qtenc::TrainConfig cfg;
        cfg.epochs = tr_epochs;
        qtenc::TrainMetrics m = qtenc::ddff_train(model, dataset, cfg, tr_seed);
        model.save(tr_out);
        std::printf("epochs=%d loss=%.4f train_acc=%.4f test_acc=%.4f -> %s\n", m.epochs_run,
                    m.final_loss, m.train_accuracy, m.test_accuracy, tr_out.c_str());
    } else if (*ev) {
        auto dataset = qtenc::load_dataset(ev_data);
        qtenc::DdffModel model = qtenc::DdffModel::load(ev_model);
        qtenc::ConfusionMatrix cm = qtenc::evaluate_model(model, dataset);
        std::printf("confusion matrix (rows true depth 1..6, cols predicted):\n");
        for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 6; ++c)
                std::printf("%10lld", (long long)cm.counts[std::size_t(r)][std::size_t(c)]);
            std::printf("\n");
        }
        qtenc::ClassificationSummary s = qtenc::classification_metrics(cm);
        for (int k = 0; k < 6; ++k) {
            const qtenc::ClassMetrics& m = s.per_class[std::size_t(k)];
            std::printf("depth %d: precision=%.4f recall=%.4f specificity=%.4f accuracy=%.4f\n",
                        k + 1, m.precision, m.recall, m.specificity, m.accuracy);
        }
        std::printf("macro:   precision=%.4f recall=%.4f specificity=%.4f accuracy=%.4f\n",
                    s.macro.precision, s.macro.recall, s.macro.specificity, s.macro.accuracy);
        std::printf("exact-depth accuracy: %.4f\n", s.exact_accuracy);
    } else if (*be) {
        auto frames = load_input(be_in.input, be_in.width, be_in.height, be_in.frames);
        qtenc::DdffModel model;
        const qtenc::DdffModel* model_ptr = nullptr;
        if (!be_model.empty()) {
            model = qtenc::DdffModel::load(be_model);
            model_ptr = &model;
        }
        qtenc::EncodeMode mode = qtenc::encode_mode_from_string(be_mode);
        if (mode == qtenc::EncodeMode::ORACLE)
            throw UsageError("bench compares against oracle; pick an accelerated --mode");
        (void)be_ctu;
        qtenc::BenchResult result =
            qtenc::run_bench(frames, model_ptr, mode, be_qps, be_jobs, be_seed);
        if (!be_report.empty())
            write_text(be_report, qtenc::bench_to_json(result, !be_no_timing).dump(2) + "\n");
        if (!be_csv.empty())
            write_text(be_csv, qtenc::bench_to_csv(result));
        std::printf("ATS=%.2f%% BDBR=%.4f%% overhead=%.2f%%\n", result.ats_percent,
                    result.bdbr_percent, result.overhead_percent);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
