// End-to-end acceptance checks. Each criterion prints a single PASS/FAIL
// line; the process exits nonzero when any criterion fails.

#include "qtenc/metrics.hpp"
#include "qtenc/pipeline.hpp"
#include "qtenc/qtmt.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qtenc;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& note) {
    std::printf("criterion %d (%s): %s%s%s\n", id, name, pass ? "PASS" : "FAIL",
                note.empty() ? "" : " -- ", note.c_str());
    std::fflush(stdout);
    if (!pass)
        ++g_failures;
}

// --- synthetic "natural" content: multi-octave value noise with motion ---

double value_noise(std::mt19937& lattice_rng, std::vector<double>& lattice, int lw, int lh,
                   double x, double y) {
    (void)lattice_rng;
    int x0 = int(std::floor(x)), y0 = int(std::floor(y));
    double fx = x - x0, fy = y - y0;
    auto at = [&](int xx, int yy) {
        xx = ((xx % lw) + lw) % lw;
        yy = ((yy % lh) + lh) % lh;
        return lattice[std::size_t(yy) * lw + xx];
    };
    auto smooth = [](double t) { return t * t * (3 - 2 * t); };
    double sx = smooth(fx), sy = smooth(fy);
    double a = at(x0, y0) * (1 - sx) + at(x0 + 1, y0) * sx;
    double b = at(x0, y0 + 1) * (1 - sx) + at(x0 + 1, y0 + 1) * sx;
    return a * (1 - sy) + b * sy;
}

std::vector<FramePlane> natural_clip(int w, int h, int frames, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int lw = 64, lh = 64;
    std::vector<std::vector<double>> octaves(4, std::vector<double>(lw * lh));
    for (auto& o : octaves)
        for (double& v : o)
            v = unit(rng);
    std::vector<FramePlane> clip;
    for (int t = 0; t < frames; ++t) {
        FramePlane p;
        p.width = p.orig_width = w;
        p.height = p.orig_height = h;
        p.frame_index = t;
        p.samples.resize(std::size_t(w) * h);
        std::mt19937 grain(seed * 977 + unsigned(t));
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double v = 0.0, amp = 0.55, freq = 1.0 / 48.0;
                for (int o = 0; o < 4; ++o) {
                    double mx = (x + 1.7 * t * (o + 1)) * freq;
                    double my = (y + 0.9 * t * (o % 2 ? 1 : -1)) * freq;
                    v += amp * value_noise(rng, octaves[std::size_t(o)], lw, lh, mx, my);
                    amp *= 0.5;
                    freq *= 2.1;
                }
                int px = int(30 + 200 * v) + int(grain() % 5) - 2;
                p.samples[std::size_t(y) * w + x] = std::uint8_t(std::clamp(px, 0, 255));
            }
        clip.push_back(pad_to_multiple_of_8(std::move(p)));
    }
    return clip;
}

// Independent brute-force tree enumeration, no memoization, same summation
// order as the search.
double enumerate_best_j(const FramePlane& plane, const QpLambda& qp, const CuNode& cu) {
    bool inside = cu.x0 + cu.width <= plane.width && cu.y0 + cu.height <= plane.height;
    double best = std::numeric_limits<double>::infinity();
    if (inside && cu.depth >= 1)
        best = cu_rd_cost(plane, cu, qp).cost.j;
    for (PartitionMode m : legal_splits(cu)) {
        double j = qp.lambda * kSplitSignalBits;
        for (const CuNode& child : split_children(cu, m)) {
            if (child.x0 >= plane.width || child.y0 >= plane.height)
                continue;
            j += enumerate_best_j(plane, qp, child);
        }
        best = std::min(best, j);
    }
    return best;
}

void criterion_oracle_optimality() {
    std::mt19937 rng(101);
    int checked = 0, exact = 0;
    auto check_ctu = [&](const FramePlane& p, int qp) {
        CuNode root{0, 0, 32, 32, 0, false};
        double got = CtuSearch(p, QpLambda::from_qp(qp)).search(root).cost.j;
        double want = enumerate_best_j(p, QpLambda::from_qp(qp), root);
        ++checked;
        if (got == want)
            ++exact;
    };
    for (int k = 0; k < 20; ++k) {
        FramePlane p;
        p.width = p.orig_width = 32;
        p.height = p.orig_height = 32;
        p.samples.resize(32 * 32);
        for (auto& s : p.samples)
            s = std::uint8_t(rng() & 0xff);
        check_ctu(p, 22 + 5 * (k % 4));
    }
    FramePlane photo = natural_clip(224, 224, 1, 55)[0];
    for (int k = 0; k < 6; ++k) {
        FramePlane p;
        p.width = p.orig_width = 32;
        p.height = p.orig_height = 32;
        p.samples.resize(32 * 32);
        int ox = (k * 37) % 192, oy = (k * 61) % 192;
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x)
                p.samples[std::size_t(y) * 32 + x] = photo.at(ox + x, oy + y);
        check_ctu(p, 22 + 5 * (k % 4));
    }
    std::ostringstream note;
    note << exact << "/" << checked << " CTUs exactly equal to the brute-force enumerator";
    report(1, "oracle optimality", checked == 26 && exact == checked, note.str());
}

void criterion_gradients() {
    // Central differences are blind at ReLU kinks: when a pre-activation
    // crosses zero inside [theta-h, theta+h] the difference quotient averages
    // two slopes and disagrees with the (correct) subgradient. A kink artifact
    // disappears once the probe shrinks past the crossing, while a genuine
    // backprop bug is h-independent, so failing parameters are re-probed at
    // h/8 and h/64 (and with the symmetric second difference, which across a
    // kink equals twice the quotient error). Kinked pairs are discarded and
    // redrawn; a persistent mismatch is a genuine failure.
    const double h = 1e-4;
    double worst = 0.0;
    long params_checked = 0;
    int accepted = 0, discarded = 0;
    bool genuine_failure = false;
    std::string failure_note;
    std::uint64_t pair_seed = 300;
    while (accepted < 10 && pair_seed < 340 && !genuine_failure) {
        std::mt19937_64 rng(7000 + pair_seed);
        std::uniform_int_distribution<int> depth(1, 6);
        DdffModel m = DdffModel::xavier_init(pair_seed++);
        std::vector<DepthSample> batch(3);
        for (auto& s : batch) {
            for (auto& d : s.depths)
                d = std::uint8_t(depth(rng));
            s.label = std::uint8_t(depth(rng));
        }
        DdffModel grad;
        double l0 = ddff_loss_and_grad(m, batch, &grad);
        auto mp = m.params();
        auto gp = grad.params();
        bool kinked = false;
        double pair_worst = 0.0;
        long pair_params = 0;
        for (std::size_t t = 0; t < mp.size() && !kinked && !genuine_failure; ++t) {
            std::vector<double>& theta = *mp[t].first;
            for (std::size_t i = 0; i < theta.size(); ++i) {
                double keep = theta[i];
                auto probe = [&](double step) {
                    theta[i] = keep + step;
                    double lp = ddff_loss_and_grad(m, batch, nullptr);
                    theta[i] = keep - step;
                    double lm = ddff_loss_and_grad(m, batch, nullptr);
                    theta[i] = keep;
                    return std::pair<double, double>{(lp - lm) / (2.0 * step), lp + lm};
                };
                auto [fd, lsum] = probe(h);
                double bp = (*gp[t].first)[i];
                auto rel_to = [&](double f) {
                    return std::abs(f - bp) / std::max({std::abs(f), std::abs(bp), 1e-7});
                };
                double rel = rel_to(fd);
                ++pair_params;
                if (rel >= 1e-4) {
                    bool kink_evidence =
                        std::abs(lsum - 2.0 * l0) / h > 0.5 * std::abs(fd - bp) ||
                        rel_to(probe(h / 8).first) < 1e-4 || rel_to(probe(h / 64).first) < 1e-4;
                    if (kink_evidence) {
                        kinked = true;
                        break;
                    }
                    genuine_failure = true;
                    std::ostringstream f;
                    f << mp[t].second << "[" << i << "]: fd " << fd << " vs bp " << bp;
                    failure_note = f.str();
                    break;
                }
                pair_worst = std::max(pair_worst, rel);
            }
        }
        if (kinked) {
            ++discarded;
        } else if (!genuine_failure) {
            ++accepted;
            worst = std::max(worst, pair_worst);
            params_checked += pair_params;
        }
    }
    std::ostringstream note;
    if (genuine_failure)
        note << "smooth-region mismatch at " << failure_note;
    else
        note << params_checked << " parameters over " << accepted
             << " model/batch pairs, worst relative error " << worst << " (" << discarded
             << " pairs redrawn for ReLU-kink probes)";
    report(2, "gradient correctness", accepted == 10 && !genuine_failure, note.str());
}

std::vector<DepthSample> synthetic_rule_dataset(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> base(1, 6), jitter(-1, 1);
    std::vector<DepthSample> data(n);
    for (auto& s : data) {
        int b = base(rng);
        double sum = 0.0;
        for (auto& d : s.depths) {
            d = std::uint8_t(std::clamp(b + jitter(rng), 1, 6));
            sum += d;
        }
        s.label = std::uint8_t(std::clamp(int(std::lround(sum / 25.0)), 1, 6));
    }
    return data;
}

void criterion_training() {
    std::vector<DepthSample> data = synthetic_rule_dataset(20000, 404);
    DdffModel model = DdffModel::xavier_init(405);
    TrainConfig cfg; // defaults: batch 256, 128 iterations, up to 50 epochs
    TrainMetrics m = ddff_train(model, data, cfg, 406, 0.955);
    std::ostringstream note;
    note << "test accuracy " << m.test_accuracy << " after " << m.epochs_run << " epochs";
    report(3, "training sanity", m.test_accuracy > 0.95 && m.epochs_run <= 50, note.str());
}

void criterion_unit_conformance() {
    bool ok = true;
    // depth adjustment arithmetic
    {
        RefDepthMap map;
        map.complete = true;
        for (auto& c : map.cells) {
            c.final_d = 3;
            c.predicted_d = 3;
        }
        ok = ok && adjust_depth(3, map) == 3; // zero offset
        for (int i = 0; i < 15; ++i)
            map.cells[std::size_t(i)].final_d = 4; // mean error 0.6 -> +1
        ok = ok && adjust_depth(3, map) == 4;
        for (auto& c : map.cells)
            c.final_d = 3;
        for (int i = 0; i < 20; ++i)
            map.cells[std::size_t(i)].final_d = 2; // mean error -0.8 -> clamp 0
        ok = ok && adjust_depth(3, map) == 3;
    }
    // per-CU depth aggregation
    ok = ok && optimal_cu_depth({2, 2, 2, 2}) == 2;
    ok = ok && optimal_cu_depth({1, 1, 6, 2}) == 6;
    ok = ok && optimal_cu_depth({5}) == 5;
    // probability estimation and ordering
    {
        PartitionStats s = mode_probabilities(
            {PartitionMode::QT, PartitionMode::QT, PartitionMode::BTH});
        ok = ok && std::abs(s.prob_of(PartitionMode::QT) - 2.0 / 3.0) < 1e-12;
        ok = ok && std::abs(s.prob_of(PartitionMode::BTH) - 1.0 / 3.0) < 1e-12;
        ok = ok && s.prob_of(PartitionMode::TTV) == 0.0;
        ok = ok && s.ordered == std::vector<PartitionMode>{PartitionMode::QT, PartitionMode::BTH,
                                                           PartitionMode::BTV, PartitionMode::TTH,
                                                           PartitionMode::TTV};
        PartitionStats all_ttv = mode_probabilities({PartitionMode::TTV, PartitionMode::TTV});
        ok = ok && all_ttv.prob_of(PartitionMode::TTV) == 1.0;
        ok = ok && all_ttv.ordered.front() == PartitionMode::TTV;
        PartitionStats empty = mode_probabilities({});
        ok = ok && empty.ordered == std::vector<PartitionMode>(kSplitModes.begin(),
                                                               kSplitModes.end());
    }
    report(4, "depth/probability arithmetic", ok, "");
}

struct LatticeResult {
    std::vector<EncodeReport> oracle, ddff, ppbe, full; // per qp
    bool ran = false;
};

LatticeResult run_lattice(const std::vector<FramePlane>& clip, const std::vector<int>& qps) {
    LatticeResult out;
    // the oracle passes double as the training-data source
    std::vector<DepthSample> dataset;
    for (int qp : qps) {
        EncodeConfig cfg;
        cfg.qp = qp;
        DatasetCollector collector;
        out.oracle.push_back(encode_sequence(clip, cfg, &collector));
        dataset.insert(dataset.end(), collector.samples().begin(), collector.samples().end());
    }
    DdffModel model = DdffModel::xavier_init(501);
    TrainConfig tc;
    tc.epochs = 8;
    ddff_train(model, dataset, tc, 502);
    for (int qp : qps) {
        EncodeConfig cfg;
        cfg.qp = qp;
        cfg.model = &model;
        cfg.mode = EncodeMode::DDFF_ONLY;
        out.ddff.push_back(encode_sequence(clip, cfg));
        cfg.mode = EncodeMode::PPBE_ONLY;
        out.ppbe.push_back(encode_sequence(clip, cfg));
        cfg.mode = EncodeMode::FULL;
        out.full.push_back(encode_sequence(clip, cfg));
    }
    out.ran = true;
    return out;
}

void criterion_lattice(const LatticeResult& r, const std::vector<int>& qps) {
    bool order_ok = true, budget_ok = true, time_ok = true;
    for (std::size_t q = 0; q < qps.size(); ++q) {
        for (const std::vector<EncodeReport>* accel : {&r.ddff, &r.ppbe, &r.full})
            for (std::size_t t = 0; t < r.oracle[q].frames.size(); ++t)
                if ((*accel)[q].frames[t].j < r.oracle[q].frames[t].j - 1e-9)
                    order_ok = false;
        if (r.full[q].total_j > 1.05 * r.oracle[q].total_j)
            budget_ok = false;
        if (r.full[q].total_time_ms >= r.oracle[q].total_time_ms)
            time_ok = false;
    }
    std::vector<double> t_ori, t_pro;
    std::vector<RdPoint> pa, pt;
    for (std::size_t q = 0; q < qps.size(); ++q) {
        t_ori.push_back(r.oracle[q].total_time_ms);
        t_pro.push_back(r.full[q].total_time_ms);
        pa.push_back({r.oracle[q].total_rate_bits, r.oracle[q].global_psnr()});
        pt.push_back({r.full[q].total_rate_bits, r.full[q].global_psnr()});
    }
    std::ostringstream note;
    note << "measured ATS " << ats(t_ori, t_pro) << "%, BDBR " << bdbr(pa, pt)
         << "% (VTM-scale reference figures: 55.59% / 1.40%)";
    report(5, "pruning soundness lattice", order_ok && budget_ok && time_ok, note.str());
    if (!order_ok)
        std::printf("  detail: an accelerated frame cost undercut the oracle\n");
    if (!budget_ok)
        std::printf("  detail: full-mode total j exceeded 1.05x oracle\n");
    if (!time_ok)
        std::printf("  detail: full mode was not faster than oracle at some qp\n");
}

void criterion_bdbr() {
    std::vector<RdPoint> c{{1000, 30}, {2000, 33}, {4000, 36}, {8000, 39}};
    bool identity = bdbr(c, c) == 0.0;
    std::vector<RdPoint> shifted = c;
    for (RdPoint& p : shifted)
        p.rate *= 1.10;
    bool shift = std::abs(bdbr(c, shifted) - 10.0) < 1e-6;
    // independent recomputation: exact interpolating cubic + Simpson quadrature
    std::vector<RdPoint> a{{820.3, 31.7}, {1542.8, 34.6}, {3215.9, 37.3}, {6901.4, 40.1}};
    std::vector<RdPoint> t{{861.1, 31.6}, {1640.2, 34.5}, {3343.7, 37.25}, {7155.0, 40.0}};
    auto fit = [](const std::vector<RdPoint>& pts) {
        long double m[4][5];
        for (int r = 0; r < 4; ++r) {
            long double x = pts[std::size_t(r)].psnr;
            m[r][0] = 1;
            m[r][1] = x;
            m[r][2] = x * x;
            m[r][3] = x * x * x;
            m[r][4] = std::log10((long double)pts[std::size_t(r)].rate);
        }
        for (int col = 0; col < 4; ++col) {
            int piv = col;
            for (int rr = col + 1; rr < 4; ++rr)
                if (std::abs(double(m[rr][col])) > std::abs(double(m[piv][col])))
                    piv = rr;
            for (int cc = 0; cc < 5; ++cc)
                std::swap(m[piv][cc], m[col][cc]);
            for (int rr = 0; rr < 4; ++rr) {
                if (rr == col)
                    continue;
                long double f = m[rr][col] / m[col][col];
                for (int cc = 0; cc < 5; ++cc)
                    m[rr][cc] -= f * m[col][cc];
            }
        }
        std::array<long double, 4> coef{};
        for (int rr = 0; rr < 4; ++rr)
            coef[std::size_t(rr)] = m[rr][4] / m[rr][rr];
        return coef;
    };
    auto ca = fit(a), ct = fit(t);
    long double lo = 31.7, hi = 40.0;
    auto diff = [&](long double x) {
        return (((ct[3] - ca[3]) * x + (ct[2] - ca[2])) * x + (ct[1] - ca[1])) * x +
               (ct[0] - ca[0]);
    };
    const int n = 4000;
    long double hstep = (hi - lo) / n, s = diff(lo) + diff(hi);
    for (int i = 1; i < n; ++i)
        s += diff(lo + i * hstep) * (i % 2 ? 4 : 2);
    double independent = double((std::pow((long double)10.0, s * hstep / 3 / (hi - lo)) - 1) * 100);
    double ours = bdbr(a, t);
    bool cross = std::abs(ours - independent) < 0.01;
    std::ostringstream note;
    note << "identity 0, x1.10 -> " << bdbr(c, shifted) << "%, cross-check delta "
         << std::abs(ours - independent);
    report(6, "bdbr correctness", identity && shift && cross, note.str());
}

void criterion_determinism() {
    const char* cli = std::getenv("QTENC_CLI");
    if (!cli || !*cli) {
        report(7, "bench determinism", false, "QTENC_CLI not set; cannot spawn the tool");
        return;
    }
    std::string yuv = "/tmp/qtenc_acceptance_clip.yuv";
    write_yuv(yuv, natural_clip(96, 64, 3, 77));
    auto run = [&](const std::string& out) {
        std::ostringstream cmd;
        cmd << '"' << cli << '"'
            << " bench --input " << yuv << " --width 96 --height 64 --mode ppbe"
            << " --seed 9 --no-timing --report " << out << " > /dev/null 2>&1";
        return std::system(cmd.str().c_str());
    };
    int rc1 = run("/tmp/qtenc_acceptance_r1.json");
    int rc2 = run("/tmp/qtenc_acceptance_r2.json");
    auto slurp = [](const char* p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    std::string r1 = slurp("/tmp/qtenc_acceptance_r1.json");
    std::string r2 = slurp("/tmp/qtenc_acceptance_r2.json");
    bool ok = rc1 == 0 && rc2 == 0 && !r1.empty() && r1 == r2;
    std::ostringstream note;
    note << "two CLI bench runs, " << r1.size() << " report bytes"
         << (ok ? ", byte-identical" : ", MISMATCH");
    report(7, "bench determinism", ok, note.str());
    std::remove(yuv.c_str());
    std::remove("/tmp/qtenc_acceptance_r1.json");
    std::remove("/tmp/qtenc_acceptance_r2.json");
}

void criterion_overhead(const LatticeResult& r, const std::vector<int>& qps) {
    for (std::size_t q = 0; q < qps.size(); ++q)
        if (qps[q] == 32) {
            double pct = overhead(r.full[q].model_time_ms, r.full[q].total_time_ms);
            std::ostringstream note;
            note << "model share " << pct << "% of full-mode time at qp 32"
                 << " (VTM-scale reference: < 1.8%)";
            report(8, "overhead accounting", pct < 5.0, note.str());
            return;
        }
    report(8, "overhead accounting", false, "qp 32 missing from the lattice");
}

void criterion_mode_correlation(const LatticeResult& r) {
    ModeCorrelationStats merged;
    for (const EncodeReport& rep : r.oracle)
        merged.merge(rep.partition_stats);
    double in_r = merged.p_best_given_in_r();
    double out_r = merged.p_best_given_not_in_r();
    std::ostringstream note;
    note << "P(best | in R) = " << in_r << " vs P(best | not in R) = " << out_r
         << " over " << (merged.in_r_events + merged.out_r_events) << " events"
         << " (VTM-scale reference: ~0.36 vs ~0.07)";
    report(9, "partition-mode correlation", merged.in_r_events > 0 && in_r > out_r, note.str());
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion_oracle_optimality();
    criterion_gradients();
    criterion_training();
    criterion_unit_conformance();

    std::vector<int> qps{22, 27, 32, 37};
    std::vector<FramePlane> clip = natural_clip(416, 240, 10, 909);
    LatticeResult lattice = run_lattice(clip, qps);
    criterion_lattice(lattice, qps);
    criterion_bdbr();
    criterion_determinism();
    criterion_overhead(lattice, qps);
    criterion_mode_correlation(lattice);

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s (%d/9 criteria, %.1f s)\n", g_failures ? "FAILURE" : "SUCCESS",
                9 - g_failures, secs);
    return g_failures ? 1 : 0;
}
