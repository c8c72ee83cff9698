#pragma once

#include <cstddef>

// Dense numeric kernels shared by the evaluator (residual checks, the
// fixed-point solver fallback) and the simulator (group statistics).
// Each operation has a scalar reference implementation and, on x86-64,
// an AVX2 variant; the backend is picked once at runtime. The
// SATRISK_KERNELS environment variable ("scalar" or "avx2") overrides
// the automatic choice.

namespace satrisk::kernels {

enum class Backend { scalar, avx2 };

/// Backend currently driving the free functions below.
Backend active_backend();

/// True when `b` is compiled in and the CPU supports it.
bool backend_supported(Backend b);

/// Force a backend. Throws input_error when unsupported on this machine.
void set_backend(Backend b);

const char* backend_name(Backend b);

double reduce_sum(const double* x, std::size_t n);
double reduce_max(const double* x, std::size_t n); // requires n >= 1
double reduce_min(const double* x, std::size_t n); // requires n >= 1
double dot(const double* a, const double* b, std::size_t n);

/// Sum of squared deviations from `center`.
double sumsq_dev(const double* x, std::size_t n, double center);

/// max_i |a[i] - b[i]|; 0 when n == 0.
double max_abs_diff(const double* a, const double* b, std::size_t n);

/// out[i] = a*x[i] + b*y[i]. `out` may alias `x` or `y`.
void axpby(double* out, double a, const double* x, double b, const double* y,
           std::size_t n);

/// y = M x for a dense row-major matrix (rows x cols). `y` must not alias.
void mat_vec(const double* m, std::size_t rows, std::size_t cols,
             const double* x, double* y);

} // namespace satrisk::kernels
