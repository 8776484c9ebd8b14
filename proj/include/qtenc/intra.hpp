#pragma once

#include "qtenc/cu.hpp"
#include "qtenc/frame.hpp"

#include <vector>

namespace qtenc {

// Lagrange multiplier tied to a Qp.
struct QpLambda {
    int qp = 32;
    double lambda = 0.0;

    static QpLambda from_qp(int qp);
};

struct RdCost {
    double distortion = 0.0; // SSE in sample-value^2 units
    double rate_bits = 0.0;
    double j = 0.0;          // distortion + lambda * rate_bits
};

enum class IntraMode : std::uint8_t {
    DC,
    PLANAR,
    HOR,
    VER,
    DIAG_DL,   // 45 degrees, references above and above-right
    DIAG_DR,   // 45 degrees, references above-left corner region
    DIAG_BL,   // 45 degrees, references left and below-left
    VER_L16,   // shallow angle off vertical
    HOR_U16,   // shallow angle off horizontal
};

constexpr int kNumIntraModes = 9;
constexpr double kModeSignalBits = 4.0;
constexpr double kLeafSignalBits = 3.0;  // partition-choice signaling per leaf
constexpr double kSplitSignalBits = 3.0; // per internal tree node

// Directional/DC/planar prediction from the reference plane's neighbors.
// References that fall outside the plane are substituted with 128.
std::vector<std::uint8_t> predict_intra(const FramePlane& ref, const CuNode& cu, IntraMode mode);

struct LeafEval {
    RdCost cost;
    IntraMode best_mode = IntraMode::DC;
};

// RD cost of coding `cu` as a single intra unit: best of the 9 modes through
// residual -> DCT -> quantize -> reconstruct. `recon`, when non-null, receives
// the best mode's reconstruction (cu.width*cu.height, row-major).
LeafEval cu_rd_cost(const FramePlane& plane, const CuNode& cu, const QpLambda& qp,
                    std::vector<std::uint8_t>* recon = nullptr);

} // namespace qtenc
