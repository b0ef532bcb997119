#include "bhv/kernels.hpp"

#include <cmath>
#include <cstdlib>

#include "bhv/errors.hpp"

namespace bhv::simd {

namespace {

using DotFn = float (*)(const float*, const float*, std::size_t);

struct Dispatch {
    Backend backend = Backend::scalar;
    DotFn dot = &dot_f32_scalar;
};

DotFn backend_dot(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &dot_f32_scalar;
#if defined(BHV_HAVE_AVX2)
        case Backend::avx2:
            return &dot_f32_avx2;
#endif
#if defined(BHV_HAVE_NEON)
        case Backend::neon:
            return &dot_f32_neon;
#endif
        default:
            return nullptr;
    }
}

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(BHV_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
        case Backend::neon:
#if defined(BHV_HAVE_NEON)
            return true;  // baseline on aarch64
#else
            return false;
#endif
    }
    return false;
}

Backend detect_backend() {
    if (const char* env = std::getenv("BHV_SIMD")) {
        std::string want(env);
        Backend b = Backend::scalar;
        if (want == "avx2") b = Backend::avx2;
        else if (want == "neon") b = Backend::neon;
        else if (want != "scalar") b = Backend::scalar;
        if (backend_available(b)) return b;
        return Backend::scalar;
    }
    if (backend_available(Backend::avx2)) return Backend::avx2;
    if (backend_available(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

Dispatch& dispatch() {
    static Dispatch d = [] {
        Dispatch init;
        init.backend = detect_backend();
        init.dot = backend_dot(init.backend);
        return init;
    }();
    return d;
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "scalar";
}

Backend active_backend() { return dispatch().backend; }

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::scalar};
    if (backend_available(Backend::avx2)) out.push_back(Backend::avx2);
    if (backend_available(Backend::neon)) out.push_back(Backend::neon);
    return out;
}

void force_backend(Backend b) {
    if (!backend_available(b)) {
        throw_invalid(std::string("simd backend not available: ") + backend_name(b));
    }
    dispatch().backend = b;
    dispatch().dot = backend_dot(b);
}

float dot_f32(const float* a, const float* b, std::size_t n) {
    return dispatch().dot(a, b, n);
}

float norm_f32(const float* v, std::size_t n) {
    return std::sqrt(dot_f32(v, v, n));
}

void dot_batch_f32(const float* query, const float* rows, std::size_t n_rows,
                   std::size_t dim, float* out_scores) {
    DotFn fn = dispatch().dot;
    for (std::size_t r = 0; r < n_rows; ++r) {
        out_scores[r] = fn(query, rows + r * dim, dim);
    }
}

}  // namespace bhv::simd
