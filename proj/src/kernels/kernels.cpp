#include "satrisk/kernels.hpp"

#include "kernels_impl.hpp"
#include "satrisk/errors.hpp"

#include <cstdlib>
#include <cstring>

namespace satrisk::kernels {
namespace {

struct Dispatch {
    const detail::KernelTable* table = nullptr;
    Backend backend = Backend::scalar;
};

bool avx2_available() {
#if SATRISK_HAVE_AVX2
    return detail::cpu_has_avx2();
#else
    return false;
#endif
}

Dispatch make_default() {
    Backend chosen = avx2_available() ? Backend::avx2 : Backend::scalar;
    if (const char* env = std::getenv("SATRISK_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) chosen = Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) chosen = Backend::avx2;
    }
    Dispatch d;
    d.backend = chosen;
#if SATRISK_HAVE_AVX2
    d.table = chosen == Backend::avx2 ? &detail::avx2_table() : &detail::scalar_table();
#else
    d.table = &detail::scalar_table();
#endif
    return d;
}

Dispatch& dispatch() {
    static Dispatch d = make_default();
    return d;
}

} // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_supported(Backend b) {
    return b == Backend::scalar || (b == Backend::avx2 && avx2_available());
}

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw input_error(std::string("kernel backend not supported on this machine: ") +
                          backend_name(b));
    Dispatch& d = dispatch();
    d.backend = b;
#if SATRISK_HAVE_AVX2
    d.table = b == Backend::avx2 ? &detail::avx2_table() : &detail::scalar_table();
#else
    d.table = &detail::scalar_table();
#endif
}

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

double reduce_sum(const double* x, std::size_t n) { return dispatch().table->reduce_sum(x, n); }
double reduce_max(const double* x, std::size_t n) { return dispatch().table->reduce_max(x, n); }
double reduce_min(const double* x, std::size_t n) { return dispatch().table->reduce_min(x, n); }

double dot(const double* a, const double* b, std::size_t n) {
    return dispatch().table->dot(a, b, n);
}

double sumsq_dev(const double* x, std::size_t n, double center) {
    return dispatch().table->sumsq_dev(x, n, center);
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    return dispatch().table->max_abs_diff(a, b, n);
}

void axpby(double* out, double a, const double* x, double b, const double* y,
           std::size_t n) {
    dispatch().table->axpby(out, a, x, b, y, n);
}

void mat_vec(const double* m, std::size_t rows, std::size_t cols,
             const double* x, double* y) {
    const detail::KernelTable* t = dispatch().table;
    for (std::size_t r = 0; r < rows; ++r) y[r] = t->dot(m + r * cols, x, cols);
}

} // namespace satrisk::kernels
