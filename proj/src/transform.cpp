#include "qtenc/transform.hpp"

#include "qtenc/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace qtenc {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct BasisCache {
    std::map<int, std::vector<double>> fwd;
    std::map<int, std::vector<double>> fwd_t;
    std::mutex mu;
};

BasisCache& cache() {
    static BasisCache c;
    return c;
}

std::vector<double> make_basis(int n) {
    std::vector<double> t(std::size_t(n) * n);
    for (int k = 0; k < n; ++k) {
        double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int i = 0; i < n; ++i)
            t[std::size_t(k) * n + i] = scale * std::cos(kPi * (2 * i + 1) * k / (2.0 * n));
    }
    return t;
}

} // namespace

const std::vector<double>& dct_basis(int n) {
    BasisCache& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.fwd.find(n);
    if (it == c.fwd.end())
        it = c.fwd.emplace(n, make_basis(n)).first;
    return it->second;
}

const std::vector<double>& dct_basis_transposed(int n) {
    BasisCache& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.fwd_t.find(n);
    if (it == c.fwd_t.end()) {
        std::vector<double> base = make_basis(n);
        std::vector<double> t(std::size_t(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                t[std::size_t(j) * n + i] = base[std::size_t(i) * n + j];
        it = c.fwd_t.emplace(n, std::move(t)).first;
    }
    return it->second;
}

void dct_forward(const double* block, double* coeffs, int w, int h) {
    const auto& th = dct_basis(h);        // h x h
    const auto& twt = dct_basis_transposed(w); // w x w (columns are basis rows)
    std::vector<double> tmp(std::size_t(h) * w);
    // tmp = T_h * X; coeffs = tmp * T_w^T
    kern::ops().matmul_f64(th.data(), block, tmp.data(), h, h, w);
    kern::ops().matmul_f64(tmp.data(), twt.data(), coeffs, h, w, w);
}

void dct_inverse(const double* coeffs, double* block, int w, int h) {
    const auto& tht = dct_basis_transposed(h); // T_h^T
    const auto& tw = dct_basis(w);
    std::vector<double> tmp(std::size_t(h) * w);
    // X = T_h^T * C * T_w
    kern::ops().matmul_f64(tht.data(), coeffs, tmp.data(), h, h, w);
    kern::ops().matmul_f64(tmp.data(), tw.data(), block, h, w, w);
}

double quant_step(int qp) {
    return std::pow(2.0, (qp - 4) / 6.0);
}

} // namespace qtenc
