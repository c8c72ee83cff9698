#pragma once

#include <cstddef>

namespace satrisk::kernels::detail {

struct KernelTable {
    double (*reduce_sum)(const double*, std::size_t);
    double (*reduce_max)(const double*, std::size_t);
    double (*reduce_min)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sumsq_dev)(const double*, std::size_t, double);
    double (*max_abs_diff)(const double*, const double*, std::size_t);
    void (*axpby)(double*, double, const double*, double, const double*, std::size_t);
};

const KernelTable& scalar_table();

#if SATRISK_HAVE_AVX2
const KernelTable& avx2_table();
bool cpu_has_avx2();
#endif

} // namespace satrisk::kernels::detail
