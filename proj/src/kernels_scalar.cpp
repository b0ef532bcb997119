// Reference kernel. The stripe/reduction pattern here is the contract all
// SIMD variants must reproduce exactly; see kernels.hpp.

#include "bhv/kernels.hpp"

namespace bhv::simd {

float dot_f32_scalar(const float* a, const float* b, std::size_t n) {
    float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t full = n / 8 * 8;
    std::size_t i = 0;
    for (; i < full; i += 8) {
        for (std::size_t j = 0; j < 8; ++j) {
            acc[j] += a[i + j] * b[i + j];
        }
    }
    if (i < n) {
        // Zero-padded final block: same adds as the vector backends do.
        for (std::size_t j = 0; j < 8; ++j) {
            float x = (i + j < n) ? a[i + j] : 0.0f;
            float y = (i + j < n) ? b[i + j] : 0.0f;
            acc[j] += x * y;
        }
    }
    float t0 = acc[0] + acc[4];
    float t1 = acc[1] + acc[5];
    float t2 = acc[2] + acc[6];
    float t3 = acc[3] + acc[7];
    float u0 = t0 + t2;
    float u1 = t1 + t3;
    return u0 + u1;
}

}  // namespace bhv::simd
