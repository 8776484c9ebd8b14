#include "qtenc/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <cstring>
#include <immintrin.h>

namespace qtenc::kern {
namespace {

std::uint64_t sse_u8_avx2(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        // widen to i16, subtract, square, accumulate pairwise into i32
        __m256i va = _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(a + i)));
        __m256i vb = _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(b + i)));
        __m256i d = _mm256_sub_epi16(va, vb);
        acc = _mm256_add_epi32(acc, _mm256_madd_epi16(d, d));
    }
    alignas(32) std::uint32_t lanes[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    std::uint64_t total = 0;
    for (std::uint32_t v : lanes) total += v;
    for (; i < n; ++i) {
        int d = int(a[i]) - int(b[i]);
        total += std::uint64_t(d * d);
    }
    return total;
}

void matmul_f64_avx2(const double* a, const double* b, double* c,
                     std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            __m256d ail = _mm256_set1_pd(a[i * k + l]);
            const double* brow = b + l * n;
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cv = _mm256_loadu_pd(crow + j);
                cv = _mm256_fmadd_pd(ail, _mm256_loadu_pd(brow + j), cv);
                _mm256_storeu_pd(crow + j, cv);
            }
            double s = a[i * k + l];
            for (; j < n; ++j)
                crow[j] += s * brow[j];
        }
    }
}

void matvec_f64_avx2(const double* w, const double* x, const double* bias,
                     double* y, std::size_t m, std::size_t k) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* wrow = w + i * k;
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= k; j += 4)
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(wrow + j), _mm256_loadu_pd(x + j), acc);
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, acc);
        double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
        for (; j < k; ++j)
            s += wrow[j] * x[j];
        y[i] = s + (bias ? bias[i] : 0.0);
    }
}

} // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
        return nullptr;
    static const Ops table{sse_u8_avx2, matmul_f64_avx2, matvec_f64_avx2, "avx2"};
    return &table;
}

} // namespace qtenc::kern

#else

namespace qtenc::kern {
const Ops* avx2_ops() { return nullptr; }
} // namespace qtenc::kern

#endif
