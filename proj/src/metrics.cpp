#include "qtenc/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qtenc {
namespace {

// Interpolating cubic through 4+ points by least squares on the Vandermonde
// system (exact interpolation when given exactly 4 distinct abscissae).
std::array<double, 4> fit_cubic(const std::vector<RdPoint>& pts) {
    std::size_t n = pts.size();
    // Normal equations A^T A c = A^T y with A[i][j] = x_i^j.
    double ata[4][4] = {};
    double aty[4] = {};
    for (const RdPoint& p : pts) {
        double x = p.psnr, y = std::log10(p.rate);
        double pw[4] = {1.0, x, x * x, x * x * x};
        for (int r = 0; r < 4; ++r) {
            aty[r] += pw[r] * y;
            for (int c = 0; c < 4; ++c)
                ata[r][c] += pw[r] * pw[c];
        }
    }
    (void)n;
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(ata[r][col]) > std::abs(ata[piv][col]))
                piv = r;
        if (std::abs(ata[piv][col]) < 1e-12)
            throw std::invalid_argument("bdbr: degenerate RD curve (repeated PSNR values)");
        if (piv != col) {
            std::swap_ranges(ata[piv], ata[piv] + 4, ata[col]);
            std::swap(aty[piv], aty[col]);
        }
        for (int r = col + 1; r < 4; ++r) {
            double f = ata[r][col] / ata[col][col];
            for (int c = col; c < 4; ++c)
                ata[r][c] -= f * ata[col][c];
            aty[r] -= f * aty[col];
        }
    }
    std::array<double, 4> coef{};
    for (int r = 3; r >= 0; --r) {
        double s = aty[r];
        for (int c = r + 1; c < 4; ++c)
            s -= ata[r][c] * coef[std::size_t(c)];
        coef[std::size_t(r)] = s / ata[r][r];
    }
    return coef;
}

double integrate_cubic(const std::array<double, 4>& c, double lo, double hi) {
    auto anti = [&](double x) {
        return ((c[3] / 4.0 * x + c[2] / 3.0) * x + c[1] / 2.0) * x * x + c[0] * x;
    };
    return anti(hi) - anti(lo);
}

} // namespace

double ats(const std::vector<double>& t_ori, const std::vector<double>& t_pro) {
    if (t_ori.empty() || t_ori.size() != t_pro.size())
        throw std::invalid_argument("ats: mismatched or empty time vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < t_ori.size(); ++i) {
        if (t_ori[i] <= 0.0 || t_pro[i] <= 0.0)
            throw std::invalid_argument("ats: times must be positive");
        sum += (t_ori[i] - t_pro[i]) / t_ori[i];
    }
    return sum / double(t_ori.size()) * 100.0;
}

double bdbr(std::vector<RdPoint> anchor, std::vector<RdPoint> test) {
    if (anchor.size() < 4 || test.size() < 4)
        throw std::invalid_argument("bdbr: need at least 4 RD points per curve");
    for (const auto& curve : {anchor, test})
        for (const RdPoint& p : curve)
            if (p.rate <= 0.0)
                throw std::invalid_argument("bdbr: rates must be positive");
    auto by_psnr = [](const RdPoint& a, const RdPoint& b) { return a.psnr < b.psnr; };
    std::sort(anchor.begin(), anchor.end(), by_psnr);
    std::sort(test.begin(), test.end(), by_psnr);
    double lo = std::max(anchor.front().psnr, test.front().psnr);
    double hi = std::min(anchor.back().psnr, test.back().psnr);
    if (hi <= lo)
        throw std::invalid_argument("bdbr: RD curves have no PSNR overlap");
    std::array<double, 4> ca = fit_cubic(anchor);
    std::array<double, 4> ct = fit_cubic(test);
    double delta = (integrate_cubic(ct, lo, hi) - integrate_cubic(ca, lo, hi)) / (hi - lo);
    return (std::pow(10.0, delta) - 1.0) * 100.0;
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
        for (std::int64_t v : row)
            t += v;
    return t;
}

std::int64_t ConfusionMatrix::diagonal() const {
    std::int64_t t = 0;
    for (std::size_t i = 0; i < 6; ++i)
        t += counts[i][i];
    return t;
}

ConfusionMatrix evaluate_model(const DdffModel& model, const std::vector<DepthSample>& samples) {
    ConfusionMatrix cm;
    std::vector<std::array<std::uint8_t, 25>> maps;
    maps.reserve(samples.size());
    for (const DepthSample& s : samples)
        maps.push_back(s.depths);
    auto probs = ddff_forward_batch(model, maps);
    for (std::size_t i = 0; i < samples.size(); ++i)
        cm.add(samples[i].label, ddff_argmax_depth(probs[i]));
    return cm;
}

ClassificationSummary classification_metrics(const ConfusionMatrix& cm) {
    std::int64_t total = cm.total();
    if (total <= 0)
        throw std::invalid_argument("classification_metrics: empty confusion matrix");
    ClassificationSummary out;
    out.exact_accuracy = double(cm.diagonal()) / double(total);
    int used = 0;
    for (std::size_t k = 0; k < 6; ++k) {
        std::int64_t tp = cm.counts[k][k], fp = 0, fn = 0;
        for (std::size_t i = 0; i < 6; ++i) {
            if (i == k)
                continue;
            fp += cm.counts[i][k];
            fn += cm.counts[k][i];
        }
        std::int64_t tn = total - tp - fp - fn;
        ClassMetrics& m = out.per_class[k];
        m.precision = tp + fp ? double(tp) / double(tp + fp) : 0.0;
        m.recall = tp + fn ? double(tp) / double(tp + fn) : 0.0;
        m.specificity = tn + fp ? double(tn) / double(tn + fp) : 0.0;
        m.accuracy = double(tp + tn) / double(total);
        if (tp + fp + fn > 0) {
            ++used;
            out.macro.precision += m.precision;
            out.macro.recall += m.recall;
            out.macro.specificity += m.specificity;
            out.macro.accuracy += m.accuracy;
        }
    }
    if (used) {
        out.macro.precision /= used;
        out.macro.recall /= used;
        out.macro.specificity /= used;
        out.macro.accuracy /= used;
    }
    return out;
}

double overhead(double model_time, double total_time) {
    if (model_time < 0.0 || total_time <= 0.0)
        throw std::invalid_argument("overhead: times must be nonnegative with total > 0");
    return model_time / total_time * 100.0;
}

std::vector<DepthSample> collect_dataset(const std::vector<FramePlane>& frames,
                                         const std::vector<int>& qps) {
    std::vector<DepthSample> out;
    for (int qp : qps) {
        EncodeConfig cfg;
        cfg.qp = qp;
        cfg.mode = EncodeMode::ORACLE;
        DatasetCollector collector;
        encode_sequence(frames, cfg, &collector);
        out.insert(out.end(), collector.samples().begin(), collector.samples().end());
    }
    return out;
}

BenchResult run_bench(const std::vector<FramePlane>& frames, const DdffModel* model,
                      EncodeMode mode, const std::vector<int>& qps, int jobs,
                      std::uint64_t seed) {
    if (qps.empty())
        throw std::invalid_argument("run_bench: empty Qp set");
    bool needs_model = mode == EncodeMode::DDFF_ONLY || mode == EncodeMode::FULL;
    bool reuse_anchor = needs_model && !model;

    BenchResult result;
    result.runs.resize(qps.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= qps.size())
                break;
            EncodeConfig cfg;
            cfg.qp = qps[i];
            cfg.seed = seed;
            cfg.mode = EncodeMode::ORACLE;
            result.runs[i].anchor = encode_sequence(frames, cfg);
            if (reuse_anchor) {
                result.runs[i].test = result.runs[i].anchor;
            } else {
                cfg.mode = mode;
                cfg.model = model;
                result.runs[i].test = encode_sequence(frames, cfg);
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<int>(jobs, int(qps.size())); ++t)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
    }

    std::vector<double> t_ori, t_pro;
    std::vector<RdPoint> anchor_pts, test_pts;
    double model_ms = 0.0, total_ms = 0.0;
    for (const BenchRun& run : result.runs) {
        t_ori.push_back(run.anchor.total_time_ms);
        t_pro.push_back(run.test.total_time_ms);
        anchor_pts.push_back(RdPoint{run.anchor.total_rate_bits, run.anchor.global_psnr()});
        test_pts.push_back(RdPoint{run.test.total_rate_bits, run.test.global_psnr()});
        model_ms += run.test.model_time_ms;
        total_ms += run.test.total_time_ms;
    }
    result.ats_percent = reuse_anchor ? 0.0 : ats(t_ori, t_pro);
    result.bdbr_percent = reuse_anchor ? 0.0 : bdbr(anchor_pts, test_pts);
    result.overhead_percent = total_ms > 0.0 ? overhead(model_ms, total_ms) : 0.0;
    return result;
}

nlohmann::ordered_json bench_to_json(const BenchResult& result, bool include_timing) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["bdbr_percent"] = result.bdbr_percent;
    if (include_timing) {
        j["ats_percent"] = result.ats_percent;
        j["overhead_percent"] = result.overhead_percent;
    }
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const BenchRun& run : result.runs) {
        nlohmann::ordered_json rj;
        rj["qp"] = run.anchor.qp;
        rj["anchor"] = report_to_json(run.anchor, include_timing);
        rj["test"] = report_to_json(run.test, include_timing);
        runs.push_back(std::move(rj));
    }
    j["runs"] = std::move(runs);
    return j;
}

std::string bench_to_csv(const BenchResult& result) {
    std::ostringstream os;
    os << "qp,side,mode,time_ms,j,psnr,rate_bits\n";
    auto row = [&os](const EncodeReport& r, const char* side) {
        os << r.qp << ',' << side << ',' << to_string(r.mode) << ',' << r.total_time_ms << ','
           << r.total_j << ',' << r.global_psnr() << ',' << r.total_rate_bits << '\n';
    };
    for (const BenchRun& run : result.runs) {
        row(run.anchor, "anchor");
        row(run.test, "test");
    }
    return os.str();
}

} // namespace qtenc
