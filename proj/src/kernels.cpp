#include "dwlab/kernels.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define DWLAB_X86 1
#else
#define DWLAB_X86 0
#endif

namespace dwlab::kern {

namespace detail {

cxd dot_w_scalar(const double* q, const cxd* u, const cxd* v, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = q ? q[j] : 1.0;
    const double ur = u[j].real(), ui = u[j].imag();
    const double vr = v[j].real(), vi = v[j].imag();
    re += w * (ur * vr + ui * vi);
    im += w * (ur * vi - ui * vr);
  }
  return {re, im};
}

void axpy_scalar(cxd a, const cxd* x, cxd* y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] += a * x[j];
}

void scale_scalar(cxd a, cxd* x, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) x[j] *= a;
}

void diag_mul_scalar(const double* d, const cxd* x, cxd* y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] = d[j] * x[j];
}

void cdiag_mul_scalar(const cxd* d, const cxd* x, cxd* y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] = d[j] * x[j];
}

void tridiag_mul_scalar(const cxd* lo, const cxd* di, const cxd* up,
                        const cxd* x, cxd* y, std::size_t n) {
  if (n == 0) return;
  if (n == 1) { y[0] = di[0] * x[0]; return; }
  y[0] = di[0] * x[0] + up[0] * x[1];
  for (std::size_t j = 1; j + 1 < n; ++j)
    y[j] = lo[j] * x[j - 1] + di[j] * x[j] + up[j] * x[j + 1];
  y[n - 1] = lo[n - 1] * x[n - 2] + di[n - 1] * x[n - 1];
}

double ddot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += x[j] * y[j];
  return s;
}

void daxpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] += a * x[j];
}

#if DWLAB_X86

// complex multiply of packed pairs: (ar+i*ai)*(br+i*bi) for two complex
// numbers per __m256d in interleaved [re0 im0 re1 im1] layout
__attribute__((target("avx2,fma"))) static inline __m256d cmul(__m256d a, __m256d b) {
  __m256d ar = _mm256_movedup_pd(a);                  // [ar0 ar0 ar1 ar1]
  __m256d ai = _mm256_permute_pd(a, 0xF);             // [ai0 ai0 ai1 ai1]
  __m256d bswap = _mm256_permute_pd(b, 0x5);          // [bi0 br0 bi1 br1]
  __m256d t = _mm256_mul_pd(ai, bswap);
  return _mm256_fmaddsub_pd(ar, b, t);                // [arbr-aibi, arbi+aibr, ...]
}

__attribute__((target("avx2,fma")))
cxd dot_w_avx2(const double* q, const cxd* u, const cxd* v, std::size_t n) {
  const double* up = reinterpret_cast<const double*>(u);
  const double* vp = reinterpret_cast<const double*>(v);
  __m256d accr = _mm256_setzero_pd();
  __m256d acci = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    __m256d uu = _mm256_loadu_pd(up + 2 * j);
    __m256d vv = _mm256_loadu_pd(vp + 2 * j);
    if (q) {
      __m128d ql = _mm_loadu_pd(q + j);               // [q0 q1]
      __m256d qq = _mm256_insertf128_pd(
          _mm256_castpd128_pd256(_mm_unpacklo_pd(ql, ql)),
          _mm_unpackhi_pd(ql, ql), 1);                // [q0 q0 q1 q1]
      vv = _mm256_mul_pd(vv, qq);
    }
    __m256d ur = _mm256_movedup_pd(uu);
    __m256d ui = _mm256_permute_pd(uu, 0xF);
    __m256d vswap = _mm256_permute_pd(vv, 0x5);
    // conj(u)*v: re = ur*vr + ui*vi, im = ur*vi - ui*vr
    accr = _mm256_fmadd_pd(ur, vv, accr);
    acci = _mm256_fmadd_pd(ui, vswap, acci);
  }
  double bufr[4], bufi[4];
  _mm256_storeu_pd(bufr, accr);
  _mm256_storeu_pd(bufi, acci);
  // accr holds [ur*vr, ur*vi, ...] ; acci holds [ui*vi, ui*vr, ...]
  double re = bufr[0] + bufr[2] + bufi[0] + bufi[2];
  double im = bufr[1] + bufr[3] - (bufi[1] + bufi[3]);
  for (; j < n; ++j) {
    const double w = q ? q[j] : 1.0;
    re += w * (u[j].real() * v[j].real() + u[j].imag() * v[j].imag());
    im += w * (u[j].real() * v[j].imag() - u[j].imag() * v[j].real());
  }
  return {re, im};
}

__attribute__((target("avx2,fma")))
void axpy_avx2(cxd a, const cxd* x, cxd* y, std::size_t n) {
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    __m256d xx = _mm256_loadu_pd(xp + 2 * j);
    __m256d yy = _mm256_loadu_pd(yp + 2 * j);
    __m256d xswap = _mm256_permute_pd(xx, 0x5);
    __m256d t = _mm256_mul_pd(ai, xswap);
    yy = _mm256_add_pd(yy, _mm256_fmaddsub_pd(ar, xx, t));
    _mm256_storeu_pd(yp + 2 * j, yy);
  }
  for (; j < n; ++j) y[j] += a * x[j];
}

__attribute__((target("avx2,fma")))
void scale_avx2(cxd a, cxd* x, std::size_t n) {
  double* xp = reinterpret_cast<double*>(x);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    __m256d xx = _mm256_loadu_pd(xp + 2 * j);
    __m256d xswap = _mm256_permute_pd(xx, 0x5);
    __m256d t = _mm256_mul_pd(ai, xswap);
    _mm256_storeu_pd(xp + 2 * j, _mm256_fmaddsub_pd(ar, xx, t));
  }
  for (; j < n; ++j) x[j] *= a;
}

__attribute__((target("avx2,fma")))
void diag_mul_avx2(const double* d, const cxd* x, cxd* y, std::size_t n) {
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    __m128d dl = _mm_loadu_pd(d + j);
    __m256d dd = _mm256_insertf128_pd(
        _mm256_castpd128_pd256(_mm_unpacklo_pd(dl, dl)),
        _mm_unpackhi_pd(dl, dl), 1);
    __m256d xx = _mm256_loadu_pd(xp + 2 * j);
    _mm256_storeu_pd(yp + 2 * j, _mm256_mul_pd(dd, xx));
  }
  for (; j < n; ++j) y[j] = d[j] * x[j];
}

__attribute__((target("avx2,fma")))
void cdiag_mul_avx2(const cxd* d, const cxd* x, cxd* y, std::size_t n) {
  const double* dp = reinterpret_cast<const double*>(d);
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    __m256d dd = _mm256_loadu_pd(dp + 2 * j);
    __m256d xx = _mm256_loadu_pd(xp + 2 * j);
    _mm256_storeu_pd(yp + 2 * j, cmul(dd, xx));
  }
  for (; j < n; ++j) y[j] = d[j] * x[j];
}

__attribute__((target("avx2,fma")))
void tridiag_mul_avx2(const cxd* lo, const cxd* di, const cxd* up,
                      const cxd* x, cxd* y, std::size_t n) {
  if (n < 4) { tridiag_mul_scalar(lo, di, up, x, y, n); return; }
  const double* lop = reinterpret_cast<const double*>(lo);
  const double* dip = reinterpret_cast<const double*>(di);
  const double* upp = reinterpret_cast<const double*>(up);
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  y[0] = di[0] * x[0] + up[0] * x[1];
  std::size_t j = 1;
  for (; j + 2 <= n - 1; j += 2) {
    __m256d acc = cmul(_mm256_loadu_pd(dip + 2 * j), _mm256_loadu_pd(xp + 2 * j));
    acc = _mm256_add_pd(acc, cmul(_mm256_loadu_pd(lop + 2 * j),
                                  _mm256_loadu_pd(xp + 2 * (j - 1))));
    acc = _mm256_add_pd(acc, cmul(_mm256_loadu_pd(upp + 2 * j),
                                  _mm256_loadu_pd(xp + 2 * (j + 1))));
    _mm256_storeu_pd(yp + 2 * j, acc);
  }
  for (; j + 1 < n; ++j) y[j] = lo[j] * x[j - 1] + di[j] * x[j] + up[j] * x[j + 1];
  y[n - 1] = lo[n - 1] * x[n - 2] + di[n - 1] * x[n - 1];
}

__attribute__((target("avx2,fma")))
double ddot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j), acc);
  double buf[4];
  _mm256_storeu_pd(buf, acc);
  double s = buf[0] + buf[1] + buf[2] + buf[3];
  for (; j < n; ++j) s += x[j] * y[j];
  return s;
}

__attribute__((target("avx2,fma")))
void daxpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d aa = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4)
    _mm256_storeu_pd(y + j, _mm256_fmadd_pd(aa, _mm256_loadu_pd(x + j),
                                            _mm256_loadu_pd(y + j)));
  for (; j < n; ++j) y[j] += a * x[j];
}

#endif // DWLAB_X86

} // namespace detail

namespace {

Isa resolve_isa() {
#if DWLAB_X86
  const char* env = std::getenv("DWLAB_SIMD");
  if (env) {
    if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    if (std::strcmp(env, "avx2") == 0) return Isa::Avx2;
  }
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Isa::Avx2;
#endif
  return Isa::Scalar;
}

} // namespace

Isa active_isa() {
  static const Isa isa = resolve_isa();
  return isa;
}

const char* isa_name() {
  return active_isa() == Isa::Avx2 ? "avx2" : "scalar";
}

#if DWLAB_X86
#define DWLAB_DISPATCH(fn, ...)                       \
  if (active_isa() == Isa::Avx2) return detail::fn##_avx2(__VA_ARGS__); \
  return detail::fn##_scalar(__VA_ARGS__)
#else
#define DWLAB_DISPATCH(fn, ...) return detail::fn##_scalar(__VA_ARGS__)
#endif

cxd dot_w(const double* q, const cxd* u, const cxd* v, std::size_t n) {
  DWLAB_DISPATCH(dot_w, q, u, v, n);
}
void axpy(cxd a, const cxd* x, cxd* y, std::size_t n) {
  DWLAB_DISPATCH(axpy, a, x, y, n);
}
void scale(cxd a, cxd* x, std::size_t n) { DWLAB_DISPATCH(scale, a, x, n); }
void diag_mul(const double* d, const cxd* x, cxd* y, std::size_t n) {
  DWLAB_DISPATCH(diag_mul, d, x, y, n);
}
void cdiag_mul(const cxd* d, const cxd* x, cxd* y, std::size_t n) {
  DWLAB_DISPATCH(cdiag_mul, d, x, y, n);
}
void tridiag_mul(const cxd* lo, const cxd* di, const cxd* up, const cxd* x,
                 cxd* y, std::size_t n) {
  DWLAB_DISPATCH(tridiag_mul, lo, di, up, x, y, n);
}
double ddot(const double* x, const double* y, std::size_t n) {
  DWLAB_DISPATCH(ddot, x, y, n);
}
void daxpy(double a, const double* x, double* y, std::size_t n) {
  DWLAB_DISPATCH(daxpy, a, x, y, n);
}

#undef DWLAB_DISPATCH

} // namespace dwlab::kern
