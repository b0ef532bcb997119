#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bhv::simd {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

// Backend picked at startup: best available, or the one named by the
// BHV_SIMD environment variable (scalar|avx2|neon).
Backend active_backend();
std::vector<Backend> available_backends();

// Test hook. Throws if the backend is not available on this machine.
void force_backend(Backend b);

// Dot product over float32. Every backend performs the identical
// operation sequence: eight stripe accumulators filled block by block
// (tails zero-padded), then a fixed-order pairwise reduction. Compiled
// with FP contraction off, so scalar, AVX2 and NEON results are
// bit-identical and ranking never depends on the dispatch decision.
float dot_f32(const float* a, const float* b, std::size_t n);

// Per-backend entry points, exposed for equivalence tests.
float dot_f32_scalar(const float* a, const float* b, std::size_t n);
#if defined(BHV_HAVE_AVX2)
float dot_f32_avx2(const float* a, const float* b, std::size_t n);
#endif
#if defined(BHV_HAVE_NEON)
float dot_f32_neon(const float* a, const float* b, std::size_t n);
#endif

// sqrt(dot(v, v)); exact IEEE sqrt on top of the striped dot.
float norm_f32(const float* v, std::size_t n);

// Scores one query against n_rows contiguous rows of length dim.
void dot_batch_f32(const float* query, const float* rows, std::size_t n_rows,
                   std::size_t dim, float* out_scores);

}  // namespace bhv::simd
