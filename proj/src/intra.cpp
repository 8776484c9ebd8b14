#include "qtenc/intra.hpp"

#include "qtenc/kernels.hpp"
#include "qtenc/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qtenc {
namespace {

constexpr int kMidSample = 128;

struct RefLines {
    // corner + two reference lines of length w+h each, 128-substituted when
    // the neighbors fall outside the plane.
    int corner;
    std::vector<int> top;
    std::vector<int> left;
};

RefLines gather_refs(const FramePlane& ref, const CuNode& cu) {
    int len = cu.width + cu.height;
    RefLines r;
    bool top_avail = cu.y0 > 0;
    bool left_avail = cu.x0 > 0;
    r.corner = (top_avail && left_avail) ? ref.at(cu.x0 - 1, cu.y0 - 1) : kMidSample;
    r.top.resize(len);
    r.left.resize(len);
    for (int i = 0; i < len; ++i)
        r.top[i] = top_avail ? ref.at(std::min(cu.x0 + i, ref.width - 1), cu.y0 - 1)
                             : kMidSample;
    for (int j = 0; j < len; ++j)
        r.left[j] = left_avail ? ref.at(cu.x0 - 1, std::min(cu.y0 + j, ref.height - 1))
                               : kMidSample;
    return r;
}

// Vertical-family angular prediction with angle in 1/32-sample units per row.
// main[0] is the corner, main[i>0] the above line, main[-k] the projected side
// line (exact for the -32 diagonal, the only negative angle in the mode set).
void predict_angular(const RefLines& r, int w, int h, int angle, bool horizontal,
                     std::vector<std::uint8_t>& out) {
    const std::vector<int>& above = horizontal ? r.left : r.top;
    const std::vector<int>& side = horizontal ? r.top : r.left;
    int main_w = horizontal ? h : w;
    int main_h = horizontal ? w : h;
    int off = main_h; // index of main[0] inside the backing array
    std::vector<int> main(std::size_t(main_w + main_h) + 2 + off);
    main[off] = r.corner;
    for (int i = 1; i <= main_w + main_h; ++i)
        main[off + i] = above[i - 1];
    main[off + main_w + main_h + 1] = above[main_w + main_h - 1];
    for (int k = 1; k <= main_h; ++k)
        main[off - k] = side[k - 1];
    for (int y = 0; y < main_h; ++y) {
        int pos = (y + 1) * angle;
        int idx = pos >> 5;
        int fact = pos & 31;
        for (int x = 0; x < main_w; ++x) {
            int a = main[off + x + idx + 1];
            int b = main[off + x + idx + 2];
            int v = ((32 - fact) * a + fact * b + 16) >> 5;
            if (horizontal)
                out[std::size_t(x) * w + y] = std::uint8_t(v);
            else
                out[std::size_t(y) * w + x] = std::uint8_t(v);
        }
    }
}

} // namespace

QpLambda QpLambda::from_qp(int qp) {
    return QpLambda{qp, 0.57 * std::pow(2.0, (qp - 12) / 3.0)};
}

std::vector<std::uint8_t> predict_intra(const FramePlane& ref, const CuNode& cu, IntraMode mode) {
    int w = cu.width;
    int h = cu.height;
    if (w <= 0 || h <= 0)
        throw std::invalid_argument("predict_intra: non-positive CU dimensions");
    if (cu.x0 < 0 || cu.y0 < 0 || cu.x0 + w > ref.width || cu.y0 + h > ref.height)
        throw std::invalid_argument("predict_intra: CU outside plane");

    RefLines r = gather_refs(ref, cu);
    std::vector<std::uint8_t> out(std::size_t(w) * h);
    switch (mode) {
    case IntraMode::DC: {
        int sum = 0;
        for (int i = 0; i < w; ++i) sum += r.top[i];
        for (int j = 0; j < h; ++j) sum += r.left[j];
        int dc = (sum + (w + h) / 2) / (w + h);
        std::fill(out.begin(), out.end(), std::uint8_t(dc));
        break;
    }
    case IntraMode::PLANAR: {
        int tr = r.top[w];
        int bl = r.left[h];
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                int pv = (h - 1 - y) * r.top[x] + (y + 1) * bl;  // scaled by h
                int ph = (w - 1 - x) * r.left[y] + (x + 1) * tr; // scaled by w
                int num = pv * w + ph * h;
                out[std::size_t(y) * w + x] = std::uint8_t((num + w * h) / (2 * w * h));
            }
        break;
    }
    case IntraMode::HOR:
        for (int y = 0; y < h; ++y)
            std::fill_n(out.begin() + std::size_t(y) * w, w, std::uint8_t(r.left[y]));
        break;
    case IntraMode::VER:
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out[std::size_t(y) * w + x] = std::uint8_t(r.top[x]);
        break;
    case IntraMode::DIAG_DL: predict_angular(r, w, h, 32, false, out); break;
    case IntraMode::DIAG_DR: predict_angular(r, w, h, -32, false, out); break;
    case IntraMode::DIAG_BL: predict_angular(r, w, h, 32, true, out); break;
    case IntraMode::VER_L16: predict_angular(r, w, h, 16, false, out); break;
    case IntraMode::HOR_U16: predict_angular(r, w, h, 16, true, out); break;
    }
    return out;
}

LeafEval cu_rd_cost(const FramePlane& plane, const CuNode& cu, const QpLambda& qp,
                    std::vector<std::uint8_t>* recon) {
    int w = cu.width;
    int h = cu.height;
    if (w <= 0 || h <= 0)
        throw std::invalid_argument("cu_rd_cost: non-positive CU dimensions");
    std::size_t n = std::size_t(w) * h;

    std::vector<std::uint8_t> orig(n);
    for (int y = 0; y < h; ++y)
        std::copy_n(plane.samples.data() + std::size_t(cu.y0 + y) * plane.width + cu.x0, w,
                    orig.data() + std::size_t(y) * w);

    double step = quant_step(qp.qp);
    std::vector<double> residual(n), coeffs(n), rec_res(n);
    std::vector<std::uint8_t> rec(n), best_rec;

    LeafEval best;
    bool have_best = false;
    for (int m = 0; m < kNumIntraModes; ++m) {
        IntraMode mode = IntraMode(m);
        std::vector<std::uint8_t> pred = predict_intra(plane, cu, mode);
        for (std::size_t i = 0; i < n; ++i)
            residual[i] = double(orig[i]) - double(pred[i]);
        dct_forward(residual.data(), coeffs.data(), w, h);

        double coeff_bits = 0.0;
        int zero_run = 0;
        for (std::size_t i = 0; i < n; ++i) {
            int level = quantize(coeffs[i], step);
            if (level == 0) {
                ++zero_run;
                coeffs[i] = 0.0;
            } else {
                if (zero_run > 0)
                    coeff_bits += 0.5;
                zero_run = 0;
                unsigned mag = unsigned(level < 0 ? -level : level);
                coeff_bits += 2.0 * std::bit_width(mag) + 1.0;
                coeffs[i] = double(level) * step;
            }
        }
        dct_inverse(coeffs.data(), rec_res.data(), w, h);
        for (std::size_t i = 0; i < n; ++i) {
            double v = double(pred[i]) + rec_res[i];
            rec[i] = std::uint8_t(std::clamp(int(std::lround(v)), 0, 255));
        }
        double distortion = double(kern::ops().sse_u8(orig.data(), rec.data(), n));
        double rate = coeff_bits + kModeSignalBits + kLeafSignalBits;
        double j = distortion + qp.lambda * rate;
        if (!have_best || j < best.cost.j) {
            have_best = true;
            best.cost = RdCost{distortion, rate, j};
            best.best_mode = mode;
            if (recon)
                best_rec = rec;
        }
    }
    if (recon)
        *recon = std::move(best_rec);
    return best;
}

} // namespace qtenc
