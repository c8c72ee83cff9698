// Scalar reference kernels. The SIMD variants are equivalence-tested
// against these, so keep them plain: no manual unrolling, no fma.

#include "kernels_impl.hpp"

#include <cmath>

namespace satrisk::kernels::detail {
namespace {

double s_reduce_sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double s_reduce_max(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = x[i] > m ? x[i] : m;
    return m;
}

double s_reduce_min(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = x[i] < m ? x[i] : m;
    return m;
}

double s_dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double s_sumsq_dev(const double* x, std::size_t n, double center) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - center;
        s += d * d;
    }
    return s;
}

double s_max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        m = d > m ? d : m;
    }
    return m;
}

void s_axpby(double* out, double a, const double* x, double b, const double* y,
             std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{s_reduce_sum, s_reduce_max, s_reduce_min,
                                   s_dot,        s_sumsq_dev,  s_max_abs_diff,
                                   s_axpby};
    return table;
}

} // namespace satrisk::kernels::detail
