#include "dwlab/banded.hpp"

#include <algorithm>
#include <cmath>

extern "C" {
void zgbtrf_(const int* m, const int* n, const int* kl, const int* ku,
             std::complex<double>* ab, const int* ldab, int* ipiv, int* info);
void zgbtrs_(const char* trans, const int* n, const int* kl, const int* ku,
             const int* nrhs, const std::complex<double>* ab, const int* ldab,
             const int* ipiv, std::complex<double>* b, const int* ldb, int* info);
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku,
             double* ab, const int* ldab, int* ipiv, int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku,
             const int* nrhs, const double* ab, const int* ldab,
             const int* ipiv, double* b, const int* ldb, int* info);
}

namespace dwlab {

void BandedMatrix::matvec(const cxd* x, cxd* y) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  if (kl_ == 1 && ku_ == 1) {
    kern::tridiag_mul(diag(-1).data(), diag(0).data(), diag(1).data(), x, y, n);
    return;
  }
  kern::cdiag_mul(diag(0).data(), x, y, n);
  for (int off = 1; off <= ku_; ++off) {
    // y_i += A(i, i+off) x_{i+off}
    const auto& d = diag(off);
    for (std::size_t i = 0; i + off < n; ++i) y[i] += d[i] * x[i + off];
  }
  for (int off = 1; off <= kl_; ++off) {
    const auto& d = diag(-off);
    for (std::size_t i = static_cast<std::size_t>(off); i < n; ++i)
      y[i] += d[i] * x[i - off];
  }
}

BandedMatrix BandedMatrix::add(const BandedMatrix& a, cxd alpha, const BandedMatrix& b) {
  BandedMatrix c(a.n_, std::max(a.kl_, b.kl_), std::max(a.ku_, b.ku_));
  for (int off = -c.kl_; off <= c.ku_; ++off) {
    auto& d = c.diag(off);
    if (off >= -a.kl_ && off <= a.ku_) {
      const auto& da = a.diag(off);
      for (int i = 0; i < c.n_; ++i) d[i] = da[i];
    }
    if (off >= -b.kl_ && off <= b.ku_) {
      const auto& db = b.diag(off);
      for (int i = 0; i < c.n_; ++i) d[i] += alpha * db[i];
    }
  }
  return c;
}

BandedMatrix BandedMatrix::mul(const BandedMatrix& a, const BandedMatrix& b) {
  BandedMatrix c(a.n_, std::min(a.n_ - 1, a.kl_ + b.kl_),
                 std::min(a.n_ - 1, a.ku_ + b.ku_));
  for (int i = 0; i < a.n_; ++i) {
    const int jlo = std::max(0, i - c.kl_), jhi = std::min(a.n_ - 1, i + c.ku_);
    for (int j = jlo; j <= jhi; ++j) {
      cxd s{0.0, 0.0};
      const int klo = std::max({0, i - a.kl_, j - b.ku_});
      const int khi = std::min({a.n_ - 1, i + a.ku_, j + b.kl_});
      for (int k = klo; k <= khi; ++k) s += a.at(i, k) * b.at(k, j);
      c.at(i, j) = s;
    }
  }
  return c;
}

BandedMatrix BandedMatrix::adjoint_in_measure(const std::vector<double>& q) const {
  BandedMatrix c(n_, ku_, kl_);
  for (int off = -kl_; off <= ku_; ++off) {
    const auto& d = diag(off);
    auto& t = c.diag(-off);
    // A^dag(j, i) = conj(A(i, j)) q_i / q_j where j = i + off
    for (int i = std::max(0, -off); i < n_ - std::max(0, off); ++i) {
      const int j = i + off;
      t[j] = std::conj(d[i]) * (q[i] / q[j]);
    }
  }
  return c;
}

BandedLU::BandedLU(const BandedMatrix& a) : a_(a) {
  const int n = a.n(), kl = a.kl(), ku = a.ku();
  for (int j = 0; j < n; ++j) {
    double cs = 0.0;
    for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i)
      cs += std::abs(a.at(i, j));
    norm1_ = std::max(norm1_, cs);
  }
  ldab_ = 2 * kl + ku + 1;
  fac_.assign(static_cast<std::size_t>(ldab_) * n, cxd{0.0, 0.0});
  ipiv_.assign(n, 0);
  // AB(kl + ku + 1 + i - j, j) = A(i, j) with 1-based LAPACK rows
  for (int off = -kl; off <= ku; ++off) {
    const auto& d = a.diag(off);
    for (int i = std::max(0, -off); i < n - std::max(0, off); ++i) {
      const int j = i + off;
      fac_[static_cast<std::size_t>(j) * ldab_ + (kl + ku + i - j)] = d[i];
    }
  }
  int info = 0;
  zgbtrf_(&n, &n, &kl, &ku, fac_.data(), &ldab_, ipiv_.data(), &info);
  singular_ = (info != 0);
}

double BandedLU::solve(const cxd* b, cxd* x, double* rel_residual_out) const {
  if (singular_)
    throw std::runtime_error(
        "banded solve: singular pivot (near-resonance of the truncated "
        "problem; enlarge Im z or r_max)");
  const int n = a_.n(), kl = a_.kl(), ku = a_.ku(), one = 1;
  const char trans = 'N';
  std::copy(b, b + n, x);
  int info = 0;
  zgbtrs_(&trans, &n, &kl, &ku, &one, fac_.data(), &ldab_, ipiv_.data(),
          reinterpret_cast<cxd*>(x), &n, &info);
  // one pass of iterative refinement
  std::vector<cxd> r(n), dx(n);
  a_.matvec(x, r.data());
  double rnorm2 = 0.0, bnorm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    r[i] = b[i] - r[i];
    rnorm2 += std::norm(r[i]);
    bnorm2 += std::norm(b[i]);
  }
  if (bnorm2 > 0.0 && rnorm2 > 1e-28 * bnorm2) {
    std::copy(r.begin(), r.end(), dx.begin());
    zgbtrs_(&trans, &n, &kl, &ku, &one, fac_.data(), &ldab_, ipiv_.data(),
            dx.data(), &n, &info);
    for (int i = 0; i < n; ++i) x[i] += dx[i];
    a_.matvec(x, r.data());
    rnorm2 = 0.0;
    for (int i = 0; i < n; ++i) rnorm2 += std::norm(b[i] - r[i]);
  }
  double xnorm2 = 0.0;
  for (int i = 0; i < n; ++i) xnorm2 += std::norm(x[i]);
  const double rn = std::sqrt(rnorm2), bn = std::sqrt(bnorm2);
  if (rel_residual_out) *rel_residual_out = bn > 0.0 ? rn / bn : 0.0;
  const double den = bn + norm1_ * std::sqrt(xnorm2);
  return den > 0.0 ? rn / den : 0.0;
}

std::vector<cxd> BandedLU::solve(const std::vector<cxd>& b) const {
  std::vector<cxd> x(b.size());
  solve(b.data(), x.data());
  return x;
}

RealBandedLU::RealBandedLU(int n, int kl, int ku,
                           const std::vector<std::vector<double>>& diags)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1) {
  fac_.assign(static_cast<std::size_t>(ldab_) * n, 0.0);
  ipiv_.assign(n, 0);
  for (int off = -kl; off <= ku; ++off) {
    const auto& d = diags[static_cast<std::size_t>(off + kl)];
    for (int i = std::max(0, -off); i < n - std::max(0, off); ++i) {
      const int j = i + off;
      fac_[static_cast<std::size_t>(j) * ldab_ + (kl + ku + i - j)] = d[i];
    }
  }
  int info = 0;
  dgbtrf_(&n_, &n_, &kl_, &ku_, fac_.data(), &ldab_, ipiv_.data(), &info);
  singular_ = (info != 0);
}

void RealBandedLU::solve_inplace(double* b) const {
  if (singular_) throw std::runtime_error("real banded solve: singular pivot");
  const int one = 1;
  const char trans = 'N';
  int info = 0;
  dgbtrs_(&trans, &n_, &kl_, &ku_, &one, fac_.data(), &ldab_, ipiv_.data(), b,
          &n_, &info);
}

} // namespace dwlab
