#pragma once

#include <cstddef>
#include <cstdint>

// Arithmetic inner loops used by the transform, distortion and network code.
// Scalar reference implementations always exist; an AVX2 variant is picked at
// runtime when the CPU supports it. Set QTENC_KERNELS=scalar to force the
// reference path.

namespace qtenc::kern {

struct Ops {
    // Sum of squared differences between two byte spans.
    std::uint64_t (*sse_u8)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);

    // C[m x n] = A[m x k] * B[k x n], all row-major doubles. C is overwritten.
    void (*matmul_f64)(const double* a, const double* b, double* c,
                       std::size_t m, std::size_t k, std::size_t n);

    // y[m] = W[m x k] * x[k] + bias[m], row-major doubles. bias may be null.
    void (*matvec_f64)(const double* w, const double* x, const double* bias,
                       double* y, std::size_t m, std::size_t k);

    const char* name;
};

const Ops& scalar_ops();

// nullptr when the CPU (or build) lacks AVX2+FMA.
const Ops* avx2_ops();

// The dispatched table, resolved once per process.
const Ops& ops();

} // namespace qtenc::kern
