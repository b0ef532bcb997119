// AVX2 variant of the striped dot kernel. Uses mul+add rather than FMA so
// rounding matches the scalar reference step for step; tails are masked
// loads, which contribute the same zero products the reference adds.

#if defined(BHV_HAVE_AVX2)

#include <immintrin.h>

#include "bhv/kernels.hpp"

namespace bhv::simd {

namespace {

inline __m256i tail_mask(std::size_t rem) {
    alignas(32) static const int kMask[16] = {-1, -1, -1, -1, -1, -1, -1, -1,
                                              0,  0,  0,  0,  0,  0,  0,  0};
    return _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(kMask + 8 - rem));
}

}  // namespace

float dot_f32_avx2(const float* a, const float* b, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t full = n / 8 * 8;
    std::size_t i = 0;
    for (; i < full; i += 8) {
        __m256 x = _mm256_loadu_ps(a + i);
        __m256 y = _mm256_loadu_ps(b + i);
        acc = _mm256_add_ps(acc, _mm256_mul_ps(x, y));
    }
    if (i < n) {
        __m256i mask = tail_mask(n - i);
        __m256 x = _mm256_maskload_ps(a + i, mask);
        __m256 y = _mm256_maskload_ps(b + i, mask);
        acc = _mm256_add_ps(acc, _mm256_mul_ps(x, y));
    }
    // Fixed reduction order: (l0+l4, l1+l5, l2+l6, l3+l7) -> pairs -> sum.
    __m128 lo = _mm256_castps256_ps128(acc);
    __m128 hi = _mm256_extractf128_ps(acc, 1);
    __m128 t = _mm_add_ps(lo, hi);
    __m128 u = _mm_add_ps(t, _mm_movehl_ps(t, t));
    __m128 r = _mm_add_ss(u, _mm_shuffle_ps(u, u, 0x55));
    return _mm_cvtss_f32(r);
}

}  // namespace bhv::simd

#endif  // BHV_HAVE_AVX2
