#include "qtenc/intra.hpp"

#include "qtenc/kernels.hpp"
#include "qtenc/transform.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace qtenc;

namespace {

FramePlane const_plane(int w, int h, std::uint8_t v) {
    FramePlane p;
    p.width = p.orig_width = w;
    p.height = p.orig_height = h;
    p.samples.assign(std::size_t(w) * h, v);
    return p;
}

FramePlane random_plane(int w, int h, unsigned seed) {
    FramePlane p = const_plane(w, h, 0);
    std::mt19937 rng(seed);
    for (auto& s : p.samples)
        s = std::uint8_t(rng() & 0xff);
    return p;
}

// Straight-line recomputation of the leaf cost: same prediction source, but
// the transform/quantizer/rate arithmetic rebuilt from the definitions.
double reference_leaf_j(const FramePlane& plane, const CuNode& cu, const QpLambda& qp) {
    int w = cu.width, h = cu.height;
    std::size_t n = std::size_t(w) * h;
    double step = std::pow(2.0, (qp.qp - 4) / 6.0);
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m < kNumIntraModes; ++m) {
        std::vector<std::uint8_t> pred = predict_intra(plane, cu, IntraMode(m));
        std::vector<double> res(n);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                res[std::size_t(y) * w + x] =
                    double(plane.at(cu.x0 + x, cu.y0 + y)) - double(pred[std::size_t(y) * w + x]);
        // O(n^2) DCT from the definition
        std::vector<double> coef(n);
        for (int v = 0; v < h; ++v)
            for (int u = 0; u < w; ++u) {
                double s = 0.0;
                for (int y = 0; y < h; ++y)
                    for (int x = 0; x < w; ++x)
                        s += res[std::size_t(y) * w + x] *
                             std::cos(M_PI / w * (x + 0.5) * u) *
                             std::cos(M_PI / h * (y + 0.5) * v);
                double cu_norm = (u == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w));
                double cv_norm = (v == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h));
                coef[std::size_t(v) * w + u] = s * cu_norm * cv_norm;
            }
        double bits = 0.0;
        int run = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double a = std::abs(coef[i]);
            int level = int(a / step + 0.5);
            if (level == 0) {
                ++run;
                coef[i] = 0.0;
            } else {
                if (run > 0)
                    bits += 0.5;
                run = 0;
                bits += 2.0 * std::ceil(std::log2(level + 1.0)) + 1.0;
                coef[i] = (coef[i] < 0 ? -level : level) * step;
            }
        }
        // inverse DCT from the definition
        double sse = 0.0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double s = 0.0;
                for (int v = 0; v < h; ++v)
                    for (int u = 0; u < w; ++u) {
                        double cu_norm = (u == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w));
                        double cv_norm = (v == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h));
                        s += coef[std::size_t(v) * w + u] * cu_norm * cv_norm *
                             std::cos(M_PI / w * (x + 0.5) * u) *
                             std::cos(M_PI / h * (y + 0.5) * v);
                    }
                int rec = std::clamp(int(std::lround(double(pred[std::size_t(y) * w + x]) + s)),
                                     0, 255);
                double d = double(plane.at(cu.x0 + x, cu.y0 + y)) - rec;
                sse += d * d;
            }
        double j = sse + qp.lambda * (bits + kModeSignalBits + kLeafSignalBits);
        best = std::min(best, j);
    }
    return best;
}

} // namespace

TEST_CASE("lambda follows the qp schedule") {
    CHECK(QpLambda::from_qp(12).lambda == doctest::Approx(0.57));
    CHECK(QpLambda::from_qp(15).lambda == doctest::Approx(1.14));
    CHECK(QpLambda::from_qp(27).lambda == doctest::Approx(0.57 * 32.0));
    CHECK(QpLambda::from_qp(22).lambda > 0.0);
}

TEST_CASE("DC prediction averages the references") {
    FramePlane p = const_plane(32, 32, 100);
    CuNode cu{8, 8, 8, 8, 2, false};
    auto pred = predict_intra(p, cu, IntraMode::DC);
    for (auto v : pred)
        CHECK(v == 100);
}

TEST_CASE("corner CU with no references predicts mid-grey") {
    FramePlane p = random_plane(32, 32, 1);
    CuNode cu{0, 0, 8, 8, 2, false};
    auto pred = predict_intra(p, cu, IntraMode::DC);
    for (auto v : pred)
        CHECK(v == 128);
    auto planar = predict_intra(p, cu, IntraMode::PLANAR);
    for (auto v : planar)
        CHECK(v == 128);
}

TEST_CASE("horizontal mode copies the left reference across each row") {
    FramePlane p = random_plane(32, 32, 2);
    CuNode cu{8, 8, 8, 8, 2, false};
    auto pred = predict_intra(p, cu, IntraMode::HOR);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            CHECK(pred[std::size_t(y) * 8 + x] == p.at(7, 8 + y));
}

TEST_CASE("vertical mode copies the top reference down each column") {
    FramePlane p = random_plane(32, 32, 3);
    CuNode cu{16, 16, 8, 4, 2, false};
    auto pred = predict_intra(p, cu, IntraMode::VER);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 8; ++x)
            CHECK(pred[std::size_t(y) * 8 + x] == p.at(16 + x, 15));
}

TEST_CASE("constant CU costs exactly the signaling bits") {
    FramePlane p = const_plane(32, 32, 77);
    CuNode cu{8, 8, 8, 8, 2, false};
    for (int qp : {22, 27, 32, 37}) {
        QpLambda ql = QpLambda::from_qp(qp);
        LeafEval e = cu_rd_cost(p, cu, ql);
        CHECK(e.cost.distortion == 0.0);
        CHECK(e.cost.rate_bits == kModeSignalBits + kLeafSignalBits);
        CHECK(e.cost.j == doctest::Approx(ql.lambda * (kModeSignalBits + kLeafSignalBits)));
    }
}

TEST_CASE("j always equals distortion plus lambda times rate") {
    FramePlane p = random_plane(32, 32, 4);
    QpLambda ql = QpLambda::from_qp(27);
    for (int y = 0; y < 32; y += 8)
        for (int x = 0; x < 32; x += 8) {
            LeafEval e = cu_rd_cost(p, CuNode{x, y, 8, 8, 2, false}, ql);
            CHECK(e.cost.j == e.cost.distortion + ql.lambda * e.cost.rate_bits);
        }
}

TEST_CASE("distortion does not decrease as qp rises") {
    for (unsigned seed : {10u, 11u, 12u}) {
        FramePlane p = random_plane(16, 16, seed);
        CuNode cu{8, 8, 8, 8, 2, false};
        double prev = -1.0;
        for (int qp : {22, 27, 32, 37}) {
            LeafEval e = cu_rd_cost(p, cu, QpLambda::from_qp(qp));
            CHECK(e.cost.distortion >= prev);
            prev = e.cost.distortion;
        }
    }
}

TEST_CASE("leaf cost matches a straight-line recomputation") {
    for (unsigned seed : {20u, 21u}) {
        FramePlane p = random_plane(16, 16, seed);
        for (auto [w, h] : {std::pair{4, 4}, {8, 4}, {8, 8}}) {
            CuNode cu{8, 8, w, h, 2, false};
            LeafEval e = cu_rd_cost(p, cu, QpLambda::from_qp(22));
            double ref = reference_leaf_j(p, cu, QpLambda::from_qp(22));
            CHECK(e.cost.j == doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("reconstruction output matches the reported distortion") {
    FramePlane p = random_plane(16, 16, 30);
    CuNode cu{8, 0, 8, 8, 2, false};
    std::vector<std::uint8_t> rec;
    LeafEval e = cu_rd_cost(p, cu, QpLambda::from_qp(32), &rec);
    REQUIRE(rec.size() == 64);
    double sse = 0.0;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            double d = double(p.at(8 + x, y)) - double(rec[std::size_t(y) * 8 + x]);
            sse += d * d;
        }
    CHECK(sse == e.cost.distortion);
}
