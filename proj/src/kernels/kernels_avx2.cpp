// AVX2 kernels. This translation unit is compiled with -mavx2 -mfma and is
// only entered through the dispatch table after a runtime CPU check.

#if SATRISK_HAVE_AVX2

#include "kernels_impl.hpp"

#include <cmath>
#include <immintrin.h>

namespace satrisk::kernels::detail {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    const double a = _mm_cvtsd_f64(lo);
    const double b = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
    return a > b ? a : b;
}

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_min_pd(lo, hi);
    const double a = _mm_cvtsd_f64(lo);
    const double b = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
    return a < b ? a : b;
}

double v_reduce_sum(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    if (i + 4 <= n) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double v_reduce_max(const double* x, std::size_t n) {
    double m = x[0];
    std::size_t i = 0;
    if (n >= 4) {
        __m256d acc = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4)
            acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
        m = hmax(acc);
    }
    for (; i < n; ++i) m = x[i] > m ? x[i] : m;
    return m;
}

double v_reduce_min(const double* x, std::size_t n) {
    double m = x[0];
    std::size_t i = 0;
    if (n >= 4) {
        __m256d acc = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4)
            acc = _mm256_min_pd(acc, _mm256_loadu_pd(x + i));
        m = hmin(acc);
    }
    for (; i < n; ++i) m = x[i] < m ? x[i] : m;
    return m;
}

double v_dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double v_sumsq_dev(const double* x, std::size_t n, double center) {
    const __m256d c = _mm256_set1_pd(center);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), c);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - center;
        s += d * d;
    }
    return s;
}

double v_max_abs_diff(const double* a, const double* b, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, d));
    }
    double m = n >= 4 ? hmax(acc) : 0.0;
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        m = d > m ? d : m;
    }
    return m;
}

void v_axpby(double* out, double a, const double* x, double b, const double* y,
             std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
    }
    for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

} // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{v_reduce_sum, v_reduce_max, v_reduce_min,
                                   v_dot,        v_sumsq_dev,  v_max_abs_diff,
                                   v_axpby};
    return table;
}

bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

} // namespace satrisk::kernels::detail

#endif // SATRISK_HAVE_AVX2
