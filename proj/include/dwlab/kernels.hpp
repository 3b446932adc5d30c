#pragma once

#include <complex>
#include <cstddef>

// Vectorized inner loops shared by the banded operators, power iteration and
// the spectral synthesis. Every kernel has a scalar reference implementation
// and an AVX2+FMA variant; the active one is picked at runtime from cpuid.
// Set DWLAB_SIMD=scalar (or avx2/auto) to override.

namespace dwlab::kern {

using cxd = std::complex<double>;

enum class Isa { Scalar, Avx2 };

Isa active_isa();
const char* isa_name();

// sum_j q_j * conj(u_j) * v_j ; q == nullptr means unweighted
cxd dot_w(const double* q, const cxd* u, const cxd* v, std::size_t n);

// y += a * x
void axpy(cxd a, const cxd* x, cxd* y, std::size_t n);

// x *= a
void scale(cxd a, cxd* x, std::size_t n);

// y = d .* x, real diagonal
void diag_mul(const double* d, const cxd* x, cxd* y, std::size_t n);

// y = d .* x, complex diagonal
void cdiag_mul(const cxd* d, const cxd* x, cxd* y, std::size_t n);

// y_j = lo_j x_{j-1} + di_j x_j + up_j x_{j+1}  (lo_0 and up_{n-1} ignored)
void tridiag_mul(const cxd* lo, const cxd* di, const cxd* up,
                 const cxd* x, cxd* y, std::size_t n);

double ddot(const double* x, const double* y, std::size_t n);
void daxpy(double a, const double* x, double* y, std::size_t n);

namespace detail {
// reference implementations, exposed for equivalence tests
cxd dot_w_scalar(const double* q, const cxd* u, const cxd* v, std::size_t n);
void axpy_scalar(cxd a, const cxd* x, cxd* y, std::size_t n);
void scale_scalar(cxd a, cxd* x, std::size_t n);
void diag_mul_scalar(const double* d, const cxd* x, cxd* y, std::size_t n);
void cdiag_mul_scalar(const cxd* d, const cxd* x, cxd* y, std::size_t n);
void tridiag_mul_scalar(const cxd* lo, const cxd* di, const cxd* up,
                        const cxd* x, cxd* y, std::size_t n);
double ddot_scalar(const double* x, const double* y, std::size_t n);
void daxpy_scalar(double a, const double* x, double* y, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
cxd dot_w_avx2(const double* q, const cxd* u, const cxd* v, std::size_t n);
void axpy_avx2(cxd a, const cxd* x, cxd* y, std::size_t n);
void scale_avx2(cxd a, cxd* x, std::size_t n);
void diag_mul_avx2(const double* d, const cxd* x, cxd* y, std::size_t n);
void cdiag_mul_avx2(const cxd* d, const cxd* x, cxd* y, std::size_t n);
void tridiag_mul_avx2(const cxd* lo, const cxd* di, const cxd* up,
                      const cxd* x, cxd* y, std::size_t n);
double ddot_avx2(const double* x, const double* y, std::size_t n);
void daxpy_avx2(double a, const double* x, double* y, std::size_t n);
#endif
} // namespace detail

} // namespace dwlab::kern
