#include "ceo/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#endif
#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace ceo::kernels {

void accumulate_scalar(const double* zs, int d, std::ptrdiff_t n, double* sum,
                       double* outer) {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const double* z = zs + j * d;
        for (int r = 0; r < d; ++r) sum[r] += z[r];
        for (int c = 0; c < d; ++c) {
            const double v = z[c];
            double* col = outer + static_cast<std::ptrdiff_t>(c) * d;
            for (int r = 0; r < d; ++r) col[r] += z[r] * v;
        }
    }
}

#if defined(__x86_64__) || defined(_M_X64)
// mul+add (no FMA) so results are bit-identical to the scalar kernel.
__attribute__((target("avx2"))) void accumulate_avx2(const double* zs, int d,
                                                     std::ptrdiff_t n, double* sum,
                                                     double* outer) {
    const int d4 = d & ~3;
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const double* z = zs + j * d;
        int r = 0;
        for (; r < d4; r += 4) {
            __m256d s = _mm256_loadu_pd(sum + r);
            s = _mm256_add_pd(s, _mm256_loadu_pd(z + r));
            _mm256_storeu_pd(sum + r, s);
        }
        for (; r < d; ++r) sum[r] += z[r];
        for (int c = 0; c < d; ++c) {
            const __m256d v = _mm256_set1_pd(z[c]);
            double* col = outer + static_cast<std::ptrdiff_t>(c) * d;
            r = 0;
            for (; r < d4; r += 4) {
                __m256d acc = _mm256_loadu_pd(col + r);
                acc = _mm256_add_pd(acc,
                                    _mm256_mul_pd(_mm256_loadu_pd(z + r), v));
                _mm256_storeu_pd(col + r, acc);
            }
            for (; r < d; ++r) col[r] += z[r] * z[c];
        }
    }
}
#endif

#if defined(__aarch64__)
void accumulate_neon(const double* zs, int d, std::ptrdiff_t n, double* sum,
                     double* outer) {
    const int d2 = d & ~1;
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const double* z = zs + j * d;
        int r = 0;
        for (; r < d2; r += 2)
            vst1q_f64(sum + r, vaddq_f64(vld1q_f64(sum + r), vld1q_f64(z + r)));
        for (; r < d; ++r) sum[r] += z[r];
        for (int c = 0; c < d; ++c) {
            const float64x2_t v = vdupq_n_f64(z[c]);
            double* col = outer + static_cast<std::ptrdiff_t>(c) * d;
            r = 0;
            for (; r < d2; r += 2) {
                float64x2_t acc = vld1q_f64(col + r);
                acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(z + r), v));
                vst1q_f64(col + r, acc);
            }
            for (; r < d; ++r) col[r] += z[r] * z[c];
        }
    }
}
#endif

AccumulateFn active_kernel() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return accumulate_avx2;
#endif
#if defined(__aarch64__)
    return accumulate_neon;
#endif
    return accumulate_scalar;
}

const char* active_kernel_name() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return "avx2";
#endif
#if defined(__aarch64__)
    return "neon";
#endif
    return "scalar";
}

}  // namespace ceo::kernels
