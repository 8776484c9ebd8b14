#pragma once

#include <cstddef>
#include <vector>

namespace qtenc {

// Orthonormal DCT-II basis for size n, row-major n*n. Cached per size.
const std::vector<double>& dct_basis(int n);
const std::vector<double>& dct_basis_transposed(int n);

// Separable 2-D orthonormal DCT-II of an h x w row-major block.
void dct_forward(const double* block, double* coeffs, int w, int h);
void dct_inverse(const double* coeffs, double* block, int w, int h);

// Uniform quantizer, round-half-away-from-zero.
inline int quantize(double coeff, double step) {
    double a = coeff >= 0 ? coeff : -coeff;
    int level = int(a / step + 0.5);
    return coeff >= 0 ? level : -level;
}

// Quantization step for a given Qp.
double quant_step(int qp);

} // namespace qtenc
