// NEON variant: two 4-lane accumulators emulate the 8-lane stripe. Plain
// vmul+vadd (no fused FMLA) keeps rounding identical to the scalar
// reference; tails run through a zero-padded block.

#if defined(BHV_HAVE_NEON)

#include <arm_neon.h>

#include "bhv/kernels.hpp"

namespace bhv::simd {

float dot_f32_neon(const float* a, const float* b, std::size_t n) {
    float32x4_t acc_lo = vdupq_n_f32(0.0f);
    float32x4_t acc_hi = vdupq_n_f32(0.0f);
    std::size_t full = n / 8 * 8;
    std::size_t i = 0;
    for (; i < full; i += 8) {
        acc_lo = vaddq_f32(acc_lo, vmulq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
        acc_hi = vaddq_f32(acc_hi, vmulq_f32(vld1q_f32(a + i + 4), vld1q_f32(b + i + 4)));
    }
    if (i < n) {
        float xa[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        float xb[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        for (std::size_t j = 0; i + j < n; ++j) {
            xa[j] = a[i + j];
            xb[j] = b[i + j];
        }
        acc_lo = vaddq_f32(acc_lo, vmulq_f32(vld1q_f32(xa), vld1q_f32(xb)));
        acc_hi = vaddq_f32(acc_hi, vmulq_f32(vld1q_f32(xa + 4), vld1q_f32(xb + 4)));
    }
    float32x4_t t = vaddq_f32(acc_lo, acc_hi);
    float t0 = vgetq_lane_f32(t, 0);
    float t1 = vgetq_lane_f32(t, 1);
    float t2 = vgetq_lane_f32(t, 2);
    float t3 = vgetq_lane_f32(t, 3);
    float u0 = t0 + t2;
    float u1 = t1 + t3;
    return u0 + u1;
}

}  // namespace bhv::simd

#endif  // BHV_HAVE_NEON
