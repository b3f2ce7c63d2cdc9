#pragma once

#include <cstddef>

namespace ceo::kernels {

/// Accumulates first and second sample moments of column-major data
/// (d rows, n columns): sum[r] += z[r] and outer[c*d + r] += z[r]*z[c]
/// for every column z. Sample order is fixed, so scalar and SIMD variants
/// produce bit-identical sums (no FMA contraction).
using AccumulateFn = void (*)(const double* zs, int d, std::ptrdiff_t n,
                              double* sum, double* outer);

void accumulate_scalar(const double* zs, int d, std::ptrdiff_t n, double* sum,
                       double* outer);

#if defined(__x86_64__) || defined(_M_X64)
void accumulate_avx2(const double* zs, int d, std::ptrdiff_t n, double* sum,
                     double* outer);
#endif
#if defined(__aarch64__)
void accumulate_neon(const double* zs, int d, std::ptrdiff_t n, double* sum,
                     double* outer);
#endif

/// Best kernel for the running CPU, chosen once at startup.
AccumulateFn active_kernel();
const char* active_kernel_name();

}  // namespace ceo::kernels
