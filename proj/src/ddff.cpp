#include "qtenc/ddff.hpp"

#include "qtenc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qtenc {
namespace {

constexpr int kMapSide = 5;
constexpr int kMapArea = 25;
constexpr int kA1Ch = 8;
constexpr int kA2Ch = 8;
constexpr int kBCh = 4;
constexpr int kConcatCh = kA2Ch + kBCh;
constexpr int kFlat = kConcatCh * kMapArea; // 300
constexpr int kFc1 = 64;
constexpr int kFc2 = 32;
constexpr int kClasses = 6;
constexpr int kPatch = 9; // 3x3

void transpose(const std::vector<double>& a, std::vector<double>& at, std::size_t rows,
               std::size_t cols) {
    at.resize(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            at[c * rows + r] = a[r * cols + c];
}

// All per-batch buffers of the forward/backward pass.
struct BatchWork {
    std::size_t B = 0;
    std::vector<double> x;      // B x 25
    std::vector<double> a1;     // B x 8 x 25 (channel-major per sample)
    std::vector<double> im2col; // (B*25) x 72
    std::vector<double> a2pre;  // (B*25) x 8
    std::vector<double> bch;    // B x 4 x 25
    std::vector<double> v;      // B x 300
    std::vector<double> h1pre, h1; // B x 64
    std::vector<double> h2pre, h2; // B x 32
    std::vector<double> logits;    // B x 6
    std::vector<double> probs;     // B x 6
    std::vector<double> scratch_t; // transposes
    std::vector<double> scratch;
};

void forward_batch(const DdffModel& m, BatchWork& w) {
    const auto& K = kern::ops();
    std::size_t B = w.B;

    // path A, 1x1 promotion
    w.a1.resize(B * kA1Ch * kMapArea);
    for (std::size_t s = 0; s < B; ++s)
        for (int c = 0; c < kA1Ch; ++c) {
            double wc = m.conv_a1_w[c], bc = m.conv_a1_b[c];
            const double* xs = w.x.data() + s * kMapArea;
            double* out = w.a1.data() + (s * kA1Ch + c) * kMapArea;
            for (int p = 0; p < kMapArea; ++p)
                out[p] = wc * xs[p] + bc;
        }

    // same-padded 3x3 via im2col: row = sample*25+pos, col = ch*9 + (ky*3+kx)
    w.im2col.assign(B * kMapArea * std::size_t(kA1Ch * kPatch), 0.0);
    for (std::size_t s = 0; s < B; ++s)
        for (int py = 0; py < kMapSide; ++py)
            for (int px = 0; px < kMapSide; ++px) {
                double* row = w.im2col.data() +
                              ((s * kMapArea) + std::size_t(py * kMapSide + px)) *
                                  (kA1Ch * kPatch);
                for (int c = 0; c < kA1Ch; ++c) {
                    const double* ch = w.a1.data() + (s * kA1Ch + c) * kMapArea;
                    for (int ky = -1; ky <= 1; ++ky)
                        for (int kx = -1; kx <= 1; ++kx) {
                            int yy = py + ky, xx = px + kx;
                            if (yy < 0 || yy >= kMapSide || xx < 0 || xx >= kMapSide)
                                continue;
                            row[c * kPatch + (ky + 1) * 3 + (kx + 1)] = ch[yy * kMapSide + xx];
                        }
                }
            }

    transpose(m.conv_a2_w, w.scratch_t, kA2Ch, kA1Ch * kPatch); // 72 x 8
    w.a2pre.resize(B * kMapArea * kA2Ch);
    K.matmul_f64(w.im2col.data(), w.scratch_t.data(), w.a2pre.data(), B * kMapArea,
                 kA1Ch * kPatch, kA2Ch);
    for (std::size_t r = 0; r < B * kMapArea; ++r)
        for (int o = 0; o < kA2Ch; ++o)
            w.a2pre[r * kA2Ch + o] += m.conv_a2_b[o];

    // path B, 1x1 only
    w.bch.resize(B * kBCh * kMapArea);
    for (std::size_t s = 0; s < B; ++s)
        for (int c = 0; c < kBCh; ++c) {
            double wc = m.conv_b_w[c], bc = m.conv_b_b[c];
            const double* xs = w.x.data() + s * kMapArea;
            double* out = w.bch.data() + (s * kBCh + c) * kMapArea;
            for (int p = 0; p < kMapArea; ++p)
                out[p] = wc * xs[p] + bc;
        }

    // concatenate channel-major (ReLU applied to path A here)
    w.v.resize(B * kFlat);
    for (std::size_t s = 0; s < B; ++s) {
        double* vs = w.v.data() + s * kFlat;
        for (int c = 0; c < kA2Ch; ++c)
            for (int p = 0; p < kMapArea; ++p)
                vs[c * kMapArea + p] = std::max(0.0, w.a2pre[(s * kMapArea + p) * kA2Ch + c]);
        for (int c = 0; c < kBCh; ++c)
            std::copy_n(w.bch.data() + (s * kBCh + c) * kMapArea, kMapArea,
                        vs + (kA2Ch + c) * kMapArea);
    }

    auto dense = [&](const std::vector<double>& wt, const std::vector<double>& bias,
                     const std::vector<double>& in, std::vector<double>& out, std::size_t n_in,
                     std::size_t n_out) {
        transpose(wt, w.scratch_t, n_out, n_in);
        out.resize(B * n_out);
        K.matmul_f64(in.data(), w.scratch_t.data(), out.data(), B, n_in, n_out);
        for (std::size_t s = 0; s < B; ++s)
            for (std::size_t o = 0; o < n_out; ++o)
                out[s * n_out + o] += bias[o];
    };

    dense(m.fc1_w, m.fc1_b, w.v, w.h1pre, kFlat, kFc1);
    w.h1 = w.h1pre;
    for (double& d : w.h1) d = std::max(0.0, d);
    dense(m.fc2_w, m.fc2_b, w.h1, w.h2pre, kFc1, kFc2);
    w.h2 = w.h2pre;
    for (double& d : w.h2) d = std::max(0.0, d);
    dense(m.fc3_w, m.fc3_b, w.h2, w.logits, kFc2, kClasses);

    w.probs.resize(B * kClasses);
    for (std::size_t s = 0; s < B; ++s) {
        const double* l = w.logits.data() + s * kClasses;
        double mx = *std::max_element(l, l + kClasses);
        double sum = 0.0;
        for (int c = 0; c < kClasses; ++c)
            sum += std::exp(l[c] - mx);
        for (int c = 0; c < kClasses; ++c)
            w.probs[s * kClasses + c] = std::exp(l[c] - mx) / sum;
    }
}

void fill_input(BatchWork& w, const std::vector<std::array<std::uint8_t, 25>>& maps) {
    w.B = maps.size();
    w.x.resize(w.B * kMapArea);
    for (std::size_t s = 0; s < w.B; ++s)
        for (int p = 0; p < kMapArea; ++p)
            w.x[s * kMapArea + p] = maps[s][p] / 6.0; // depths scaled to (0,1]
}

std::vector<double> xavier(std::mt19937_64& rng, std::size_t n, double fan_in, double fan_out) {
    double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    std::vector<double> out(n);
    for (double& d : out) d = dist(rng);
    return out;
}

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}
std::uint32_t read_u32(std::ifstream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

} // namespace

DdffModel DdffModel::zeros() {
    DdffModel m;
    m.conv_a1_w.assign(kA1Ch, 0.0);
    m.conv_a1_b.assign(kA1Ch, 0.0);
    m.conv_a2_w.assign(std::size_t(kA2Ch) * kA1Ch * kPatch, 0.0);
    m.conv_a2_b.assign(kA2Ch, 0.0);
    m.conv_b_w.assign(kBCh, 0.0);
    m.conv_b_b.assign(kBCh, 0.0);
    m.fc1_w.assign(std::size_t(kFc1) * kFlat, 0.0);
    m.fc1_b.assign(kFc1, 0.0);
    m.fc2_w.assign(std::size_t(kFc2) * kFc1, 0.0);
    m.fc2_b.assign(kFc2, 0.0);
    m.fc3_w.assign(std::size_t(kClasses) * kFc2, 0.0);
    m.fc3_b.assign(kClasses, 0.0);
    return m;
}

DdffModel DdffModel::xavier_init(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    DdffModel m = zeros();
    m.conv_a1_w = xavier(rng, kA1Ch, 1, kA1Ch);
    m.conv_a2_w = xavier(rng, std::size_t(kA2Ch) * kA1Ch * kPatch, kA1Ch * kPatch,
                         kA2Ch * kPatch);
    m.conv_b_w = xavier(rng, kBCh, 1, kBCh);
    m.fc1_w = xavier(rng, std::size_t(kFc1) * kFlat, kFlat, kFc1);
    m.fc2_w = xavier(rng, std::size_t(kFc2) * kFc1, kFc1, kFc2);
    m.fc3_w = xavier(rng, std::size_t(kClasses) * kFc2, kFc2, kClasses);
    return m;
}

std::vector<std::pair<std::vector<double>*, std::string>> DdffModel::params() {
    return {{&conv_a1_w, "conv_a1_w"}, {&conv_a1_b, "conv_a1_b"},
            {&conv_a2_w, "conv_a2_w"}, {&conv_a2_b, "conv_a2_b"},
            {&conv_b_w, "conv_b_w"},   {&conv_b_b, "conv_b_b"},
            {&fc1_w, "fc1_w"},         {&fc1_b, "fc1_b"},
            {&fc2_w, "fc2_w"},         {&fc2_b, "fc2_b"},
            {&fc3_w, "fc3_w"},         {&fc3_b, "fc3_b"}};
}

std::vector<std::pair<const std::vector<double>*, std::string>> DdffModel::params() const {
    auto mut = const_cast<DdffModel*>(this)->params();
    std::vector<std::pair<const std::vector<double>*, std::string>> out;
    out.reserve(mut.size());
    for (auto& [vec, name] : mut)
        out.emplace_back(vec, name);
    return out;
}

RefDepthMap build_ref_map(const DepthGrid& cur, const DepthGrid* prev, int bx, int by) {
    RefDepthMap map;
    map.complete = true;
    for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx) {
            RefCell& cell = map.cells[(dy + 2) * 5 + (dx + 2)];
            int nx = bx + dx, ny = by + dy;
            if (!cur.in_range(nx, ny)) {
                map.complete = false;
                continue;
            }
            bool causal = dx < 0 || (dx == 0 && dy < 0);
            std::size_t i = cur.idx(nx, ny);
            if (causal && cur.final_depth[i] != 0) {
                cell.final_d = cur.final_depth[i];
                cell.predicted_d = cur.predicted_depth[i];
                cell.from_prev_frame = false;
            } else if (prev && prev->final_depth[i] != 0) {
                cell.final_d = prev->final_depth[i];
                cell.predicted_d = prev->predicted_depth[i];
                cell.from_prev_frame = true;
            } else {
                map.complete = false;
            }
        }
    return map;
}

std::vector<std::array<double, 6>>
ddff_forward_batch(const DdffModel& model, const std::vector<std::array<std::uint8_t, 25>>& maps) {
    std::vector<std::array<double, 6>> out(maps.size());
    if (maps.empty())
        return out;
    BatchWork w;
    fill_input(w, maps);
    forward_batch(model, w);
    for (std::size_t s = 0; s < maps.size(); ++s)
        std::copy_n(w.probs.data() + s * kClasses, kClasses, out[s].begin());
    return out;
}

std::array<double, 6> ddff_forward(const DdffModel& model, const RefDepthMap& map) {
    if (!map.complete)
        throw std::invalid_argument("ddff_forward: incomplete reference map");
    return ddff_forward_batch(model, {map.depths()})[0];
}

int ddff_argmax_depth(const std::array<double, 6>& probs) {
    int best = 0;
    for (int c = 1; c < kClasses; ++c)
        if (probs[c] > probs[best])
            best = c; // ties keep the shallower depth
    return best + 1;
}

double ddff_loss_and_grad(const DdffModel& m, const std::vector<DepthSample>& batch,
                          DdffModel* grad) {
    if (batch.empty())
        throw std::invalid_argument("ddff_loss_and_grad: empty batch");
    const auto& K = kern::ops();
    std::size_t B = batch.size();
    BatchWork w;
    {
        std::vector<std::array<std::uint8_t, 25>> maps(B);
        for (std::size_t s = 0; s < B; ++s)
            maps[s] = batch[s].depths;
        fill_input(w, maps);
    }
    forward_batch(m, w);

    double loss = 0.0;
    for (std::size_t s = 0; s < B; ++s) {
        int cls = batch[s].label - 1;
        loss -= std::log(std::max(w.probs[s * kClasses + cls], 1e-300));
    }
    loss /= double(B);
    if (!grad)
        return loss;

    DdffModel& g = *grad;
    g = DdffModel::zeros();

    // softmax + cross-entropy
    std::vector<double> d_logits(w.probs);
    for (std::size_t s = 0; s < B; ++s)
        d_logits[s * kClasses + (batch[s].label - 1)] -= 1.0;
    for (double& d : d_logits) d /= double(B);

    std::vector<double> tmp_t, tmp;
    auto dense_backward = [&](const std::vector<double>& wt, const std::vector<double>& acts_in,
                              const std::vector<double>& d_out, std::vector<double>& d_w,
                              std::vector<double>& d_b, std::vector<double>& d_in,
                              std::size_t n_in, std::size_t n_out) {
        transpose(d_out, tmp_t, B, n_out); // n_out x B
        d_w.resize(n_out * n_in);
        K.matmul_f64(tmp_t.data(), acts_in.data(), d_w.data(), n_out, B, n_in);
        d_b.assign(n_out, 0.0);
        for (std::size_t s = 0; s < B; ++s)
            for (std::size_t o = 0; o < n_out; ++o)
                d_b[o] += d_out[s * n_out + o];
        d_in.resize(B * n_in);
        K.matmul_f64(d_out.data(), wt.data(), d_in.data(), B, n_out, n_in);
    };

    std::vector<double> d_h2, d_h1, d_v;
    dense_backward(m.fc3_w, w.h2, d_logits, g.fc3_w, g.fc3_b, d_h2, kFc2, kClasses);
    for (std::size_t i = 0; i < d_h2.size(); ++i)
        if (w.h2pre[i] <= 0.0) d_h2[i] = 0.0;
    dense_backward(m.fc2_w, w.h1, d_h2, g.fc2_w, g.fc2_b, d_h1, kFc1, kFc2);
    for (std::size_t i = 0; i < d_h1.size(); ++i)
        if (w.h1pre[i] <= 0.0) d_h1[i] = 0.0;
    dense_backward(m.fc1_w, w.v, d_h1, g.fc1_w, g.fc1_b, d_v, kFlat, kFc1);

    // split concat gradient back into the two paths
    std::vector<double> d_a2pre(B * kMapArea * kA2Ch, 0.0);
    std::vector<double> d_bch(B * kBCh * kMapArea, 0.0);
    for (std::size_t s = 0; s < B; ++s) {
        const double* dvs = d_v.data() + s * kFlat;
        for (int c = 0; c < kA2Ch; ++c)
            for (int p = 0; p < kMapArea; ++p) {
                std::size_t r = (s * kMapArea + p) * kA2Ch + c;
                if (w.a2pre[r] > 0.0)
                    d_a2pre[r] = dvs[c * kMapArea + p];
            }
        for (int c = 0; c < kBCh; ++c)
            std::copy_n(dvs + (kA2Ch + c) * kMapArea, kMapArea,
                        d_bch.data() + (s * kBCh + c) * kMapArea);
    }

    // 3x3 conv weights/bias and input gradient
    transpose(d_a2pre, tmp_t, B * kMapArea, kA2Ch); // 8 x (B*25)
    g.conv_a2_w.resize(std::size_t(kA2Ch) * kA1Ch * kPatch);
    K.matmul_f64(tmp_t.data(), w.im2col.data(), g.conv_a2_w.data(), kA2Ch, B * kMapArea,
                 kA1Ch * kPatch);
    g.conv_a2_b.assign(kA2Ch, 0.0);
    for (std::size_t r = 0; r < B * kMapArea; ++r)
        for (int o = 0; o < kA2Ch; ++o)
            g.conv_a2_b[o] += d_a2pre[r * kA2Ch + o];

    std::vector<double> d_im2col(B * kMapArea * std::size_t(kA1Ch * kPatch));
    K.matmul_f64(d_a2pre.data(), m.conv_a2_w.data(), d_im2col.data(), B * kMapArea, kA2Ch,
                 kA1Ch * kPatch);
    std::vector<double> d_a1(B * kA1Ch * kMapArea, 0.0);
    for (std::size_t s = 0; s < B; ++s)
        for (int py = 0; py < kMapSide; ++py)
            for (int px = 0; px < kMapSide; ++px) {
                const double* row = d_im2col.data() +
                                    ((s * kMapArea) + std::size_t(py * kMapSide + px)) *
                                        (kA1Ch * kPatch);
                for (int c = 0; c < kA1Ch; ++c)
                    for (int ky = -1; ky <= 1; ++ky)
                        for (int kx = -1; kx <= 1; ++kx) {
                            int yy = py + ky, xx = px + kx;
                            if (yy < 0 || yy >= kMapSide || xx < 0 || xx >= kMapSide)
                                continue;
                            d_a1[(s * kA1Ch + c) * kMapArea + yy * kMapSide + xx] +=
                                row[c * kPatch + (ky + 1) * 3 + (kx + 1)];
                        }
            }

    // 1x1 promotions
    g.conv_a1_w.assign(kA1Ch, 0.0);
    g.conv_a1_b.assign(kA1Ch, 0.0);
    g.conv_b_w.assign(kBCh, 0.0);
    g.conv_b_b.assign(kBCh, 0.0);
    for (std::size_t s = 0; s < B; ++s) {
        const double* xs = w.x.data() + s * kMapArea;
        for (int c = 0; c < kA1Ch; ++c) {
            const double* da = d_a1.data() + (s * kA1Ch + c) * kMapArea;
            for (int p = 0; p < kMapArea; ++p) {
                g.conv_a1_w[c] += da[p] * xs[p];
                g.conv_a1_b[c] += da[p];
            }
        }
        for (int c = 0; c < kBCh; ++c) {
            const double* db = d_bch.data() + (s * kBCh + c) * kMapArea;
            for (int p = 0; p < kMapArea; ++p) {
                g.conv_b_w[c] += db[p] * xs[p];
                g.conv_b_b[c] += db[p];
            }
        }
    }
    return loss;
}

double ddff_accuracy(const DdffModel& model, const std::vector<DepthSample>& samples) {
    if (samples.empty())
        return 0.0;
    std::vector<std::array<std::uint8_t, 25>> maps(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        maps[i] = samples[i].depths;
    auto probs = ddff_forward_batch(model, maps);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (ddff_argmax_depth(probs[i]) == samples[i].label)
            ++hits;
    return double(hits) / double(samples.size());
}

void split_dataset(const std::vector<DepthSample>& all, std::uint64_t seed,
                   std::vector<DepthSample>& train, std::vector<DepthSample>& test) {
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t n_train = all.size() * 4 / 5;
    train.clear();
    test.clear();
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < n_train ? train : test).push_back(all[order[i]]);
}

TrainMetrics ddff_train(DdffModel& model, const std::vector<DepthSample>& dataset,
                        const TrainConfig& cfg, std::uint64_t seed,
                        double target_test_accuracy) {
    if (dataset.empty())
        throw std::invalid_argument("ddff_train: empty dataset");
    for (const DepthSample& s : dataset)
        if (s.label < 1 || s.label > 6)
            throw std::invalid_argument("ddff_train: label outside 1..6");

    std::vector<DepthSample> train, test;
    split_dataset(dataset, seed, train, test);
    if (train.empty())
        train = dataset;

    auto names = model.params();
    std::vector<std::vector<double>> adam_m(names.size()), adam_v(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        adam_m[i].assign(names[i].first->size(), 0.0);
        adam_v[i].assign(names[i].first->size(), 0.0);
    }

    std::mt19937_64 rng(seed + 1);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t cursor = 0;

    TrainMetrics metrics;
    DdffModel grad;
    long step = 0;
    std::size_t batch_size = std::min<std::size_t>(std::size_t(cfg.batch_size), train.size());
    std::vector<DepthSample> batch(batch_size);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss_sum = 0.0;
        for (int it = 0; it < cfg.iters_per_epoch; ++it) {
            for (std::size_t i = 0; i < batch_size; ++i) {
                if (cursor == order.size()) {
                    std::shuffle(order.begin(), order.end(), rng);
                    cursor = 0;
                }
                batch[i] = train[order[cursor++]];
            }
            loss_sum += ddff_loss_and_grad(model, batch, &grad);
            ++step;
            double bc1 = 1.0 - std::pow(cfg.beta1, double(step));
            double bc2 = 1.0 - std::pow(cfg.beta2, double(step));
            auto gparams = grad.params();
            for (std::size_t p = 0; p < names.size(); ++p) {
                std::vector<double>& theta = *names[p].first;
                const std::vector<double>& gv = *gparams[p].first;
                for (std::size_t i = 0; i < theta.size(); ++i) {
                    adam_m[p][i] = cfg.beta1 * adam_m[p][i] + (1.0 - cfg.beta1) * gv[i];
                    adam_v[p][i] = cfg.beta2 * adam_v[p][i] + (1.0 - cfg.beta2) * gv[i] * gv[i];
                    double mhat = adam_m[p][i] / bc1;
                    double vhat = adam_v[p][i] / bc2;
                    theta[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
                }
            }
        }
        metrics.final_loss = loss_sum / cfg.iters_per_epoch;
        metrics.epochs_run = epoch + 1;
        if (target_test_accuracy > 0.0 && !test.empty()) {
            if (ddff_accuracy(model, test) >= target_test_accuracy)
                break;
        }
    }
    metrics.train_accuracy = ddff_accuracy(model, train);
    metrics.test_accuracy = test.empty() ? metrics.train_accuracy : ddff_accuracy(model, test);
    return metrics;
}

int optimal_cu_depth(const std::vector<int>& block_depths) {
    int d = 0;
    for (int v : block_depths)
        d = std::max(d, v);
    return d;
}

int adjust_depth(int predicted, const RefDepthMap& map) {
    double err_sum = 0.0;
    for (const RefCell& cell : map.cells)
        if (cell.predicted_d != 0)
            err_sum += double(cell.final_d) - double(cell.predicted_d);
    int offset = std::max(int(std::floor(err_sum / 25.0 + 0.5)), 0);
    return std::clamp(predicted + offset, 1, 6);
}

void save_dataset(const std::string& path, const std::vector<DepthSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("save_dataset: cannot open " + path);
    out.write("DDS1", 4);
    std::uint64_t count = samples.size();
    out.write(reinterpret_cast<const char*>(&count), 8);
    for (const DepthSample& s : samples) {
        out.write(reinterpret_cast<const char*>(s.depths.data()), 25);
        out.write(reinterpret_cast<const char*>(&s.label), 1);
    }
    if (!out)
        throw std::runtime_error("save_dataset: write failed: " + path);
}

std::vector<DepthSample> load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_dataset: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "DDS1", 4) != 0)
        throw std::runtime_error("load_dataset: bad magic in " + path);
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 8);
    std::vector<DepthSample> samples(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        in.read(reinterpret_cast<char*>(samples[i].depths.data()), 25);
        in.read(reinterpret_cast<char*>(&samples[i].label), 1);
    }
    if (!in)
        throw std::runtime_error("load_dataset: truncated file " + path);
    return samples;
}

void DdffModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("DdffModel::save: cannot open " + path);
    out.write("DDFF", 4);
    write_u32(out, 1); // version; classes are depths 1..6 at indices 0..5
    auto layers = params();
    write_u32(out, std::uint32_t(layers.size()));
    for (auto& [vec, name] : layers) {
        write_u32(out, std::uint32_t(vec->size()));
        for (double d : *vec) {
            float f = float(d);
            out.write(reinterpret_cast<const char*>(&f), 4);
        }
    }
    if (!out)
        throw std::runtime_error("DdffModel::save: write failed: " + path);
}

DdffModel DdffModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("DdffModel::load: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "DDFF", 4) != 0)
        throw std::runtime_error("DdffModel::load: bad magic in " + path);
    if (read_u32(in) != 1)
        throw std::runtime_error("DdffModel::load: unsupported version in " + path);
    DdffModel m = zeros();
    auto layers = m.params();
    if (read_u32(in) != layers.size())
        throw std::runtime_error("DdffModel::load: layer count mismatch in " + path);
    for (auto& [vec, name] : layers) {
        std::uint32_t n = read_u32(in);
        if (n != vec->size())
            throw std::runtime_error("DdffModel::load: size mismatch for " + name);
        for (std::uint32_t i = 0; i < n; ++i) {
            float f = 0;
            in.read(reinterpret_cast<char*>(&f), 4);
            (*vec)[i] = double(f);
        }
    }
    if (!in)
        throw std::runtime_error("DdffModel::load: truncated file " + path);
    return m;
}

} // namespace qtenc
