#include "qtenc/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace qtenc::kern {

const Ops& ops() {
    static const Ops* selected = [] {
        const char* env = std::getenv("QTENC_KERNELS");
        if (env && std::strcmp(env, "scalar") == 0)
            return &scalar_ops();
        if (const Ops* simd = avx2_ops())
            return simd;
        return &scalar_ops();
    }();
    return *selected;
}

} // namespace qtenc::kern
