// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------
//
// Compiled with -mavx2 only; nothing in here may run before the dispatcher
// has confirmed CPU support.

#include "kernels_impl.hpp"

#include <immintrin.h>

namespace skyloss::simd::detail {

namespace {

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// One slab axis for four boxes. `lo`/`hi` are box bounds, `o` the segment
// origin on this axis.
inline void clip_axis(__m256d lo, __m256d hi, double o, double d, double inv_d, __m256d& enter, __m256d& exit,
                      __m256d& inside)
{
    const __m256d ov = _mm256_set1_pd(o);
    if (d == 0.0) {
        const __m256d in_slab =
            _mm256_and_pd(_mm256_cmp_pd(lo, ov, _CMP_LT_OQ), _mm256_cmp_pd(ov, hi, _CMP_LT_OQ));
        inside = _mm256_and_pd(inside, in_slab);
        return;
    }
    const __m256d inv = _mm256_set1_pd(inv_d);
    const __m256d ta = _mm256_mul_pd(_mm256_sub_pd(lo, ov), inv);
    const __m256d tb = _mm256_mul_pd(_mm256_sub_pd(hi, ov), inv);
    enter = _mm256_max_pd(enter, _mm256_min_pd(ta, tb));
    exit = _mm256_min_pd(exit, _mm256_max_pd(ta, tb));
}

} // namespace

double dot_avx2(const double* a, const double* b, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

double sum_avx2(const double* a, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i)
        s += a[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n)
{
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d yv = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(av, _mm256_loadu_pd(x + i))));
    }
    for (; i < n; ++i)
        y[i] += alpha * x[i];
}

std::size_t segment_box_hits_avx2(const BoxSoA& b, const Segment& s, std::uint8_t* hits)
{
    const double inv_dx = 1.0 / s.dx;
    const double inv_dy = 1.0 / s.dy;
    const double inv_dz = 1.0 / s.dz;
    const std::size_t n = b.size();
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d all = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));

    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d enter = zero;
        __m256d exit = one;
        __m256d inside = all;
        clip_axis(_mm256_loadu_pd(&b.x_min[i]), _mm256_loadu_pd(&b.x_max[i]), s.ox, s.dx, inv_dx, enter, exit,
                  inside);
        clip_axis(_mm256_loadu_pd(&b.y_min[i]), _mm256_loadu_pd(&b.y_max[i]), s.oy, s.dy, inv_dy, enter, exit,
                  inside);
        clip_axis(zero, _mm256_loadu_pd(&b.z_max[i]), s.oz, s.dz, inv_dz, enter, exit, inside);
        const __m256d hit = _mm256_and_pd(inside, _mm256_cmp_pd(enter, exit, _CMP_LT_OQ));
        const int mask = _mm256_movemask_pd(hit);
        count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
        if (hits) {
            for (int k = 0; k < 4; ++k)
                hits[i + k] = static_cast<std::uint8_t>((mask >> k) & 1);
        }
    }
    for (; i < n; ++i) {
        const bool hit =
            segment_hits_box(s, inv_dx, inv_dy, inv_dz, b.x_min[i], b.y_min[i], b.x_max[i], b.y_max[i], b.z_max[i]);
        count += hit ? 1 : 0;
        if (hits)
            hits[i] = hit ? 1 : 0;
    }
    return count;
}

} // namespace skyloss::simd::detail
