#include "qtenc/kernels.hpp"

#include <cstring>

namespace qtenc::kern {
namespace {

std::uint64_t sse_u8_scalar(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int d = int(a[i]) - int(b[i]);
        acc += std::uint64_t(d * d);
    }
    return acc;
}

void matmul_f64_scalar(const double* a, const double* b, double* c,
                       std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            double ail = a[i * k + l];
            const double* brow = b + l * n;
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j)
                crow[j] += ail * brow[j];
        }
    }
}

void matvec_f64_scalar(const double* w, const double* x, const double* bias,
                       double* y, std::size_t m, std::size_t k) {
    for (std::size_t i = 0; i < m; ++i) {
        double acc = bias ? bias[i] : 0.0;
        const double* wrow = w + i * k;
        for (std::size_t j = 0; j < k; ++j)
            acc += wrow[j] * x[j];
        y[i] = acc;
    }
}

} // namespace

const Ops& scalar_ops() {
    static const Ops table{sse_u8_scalar, matmul_f64_scalar, matvec_f64_scalar, "scalar"};
    return table;
}

} // namespace qtenc::kern
