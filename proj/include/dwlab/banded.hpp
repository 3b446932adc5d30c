#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "dwlab/kernels.hpp"

namespace dwlab {

using cxd = std::complex<double>;

// Complex banded matrix stored as diagonals (offset -kl..+ku, each length n,
// entries outside the matrix are zero). Diagonal storage keeps the matvec
// vectorizable; the LU factorization converts to LAPACK band layout.
class BandedMatrix {
public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), diags_(static_cast<std::size_t>(kl + ku + 1),
                                        std::vector<cxd>(n, cxd{0.0, 0.0})) {}

  int n() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  cxd& at(int i, int j) {
    check(i, j);
    return diags_[static_cast<std::size_t>(j - i + kl_)][i];
  }
  cxd at(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) return {0.0, 0.0};
    const int off = j - i;
    if (off < -kl_ || off > ku_) return {0.0, 0.0};
    return diags_[static_cast<std::size_t>(off + kl_)][i];
  }

  // contiguous diagonal with offset in [-kl, ku]; diag(off)[i] = A(i, i+off)
  std::vector<cxd>& diag(int off) { return diags_[static_cast<std::size_t>(off + kl_)]; }
  const std::vector<cxd>& diag(int off) const {
    return diags_[static_cast<std::size_t>(off + kl_)];
  }

  void matvec(const cxd* x, cxd* y) const;

  // C = A + alpha * B (bands widened as needed)
  static BandedMatrix add(const BandedMatrix& a, cxd alpha, const BandedMatrix& b);
  // C = A * B, band widths add
  static BandedMatrix mul(const BandedMatrix& a, const BandedMatrix& b);

  // conjugate transpose with respect to the weighted inner product
  // <u,v> = sum q_j u_j conj(v_j):  A^dag = Q^{-1} A^H Q
  BandedMatrix adjoint_in_measure(const std::vector<double>& q) const;

private:
  void check(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || j - i < -kl_ || j - i > ku_)
      throw std::out_of_range("BandedMatrix::at outside band");
  }
  int n_ = 0, kl_ = 0, ku_ = 0;
  std::vector<std::vector<cxd>> diags_;
};

// LU factorization with partial pivoting (LAPACK zgbtrf) plus solve with one
// step of iterative refinement against the original matrix.
class BandedLU {
public:
  explicit BandedLU(const BandedMatrix& a);

  // solve A x = b; returns the backward error |Ax-b| / (|b| + |A|_1 |x|)
  // after refinement; rel_residual_out receives |Ax-b|/|b| when requested
  double solve(const cxd* b, cxd* x, double* rel_residual_out = nullptr) const;
  std::vector<cxd> solve(const std::vector<cxd>& b) const;

  bool singular() const { return singular_; }
  int n() const { return a_.n(); }
  double norm1() const { return norm1_; }

private:
  BandedMatrix a_;
  double norm1_ = 0.0;
  std::vector<cxd> fac_;   // LAPACK band storage, ldab = 2*kl+ku+1
  std::vector<int> ipiv_;
  int ldab_ = 0;
  bool singular_ = false;
};

// Real banded LU (dgbtrf), used by the time stepper.
class RealBandedLU {
public:
  RealBandedLU(int n, int kl, int ku, const std::vector<std::vector<double>>& diags);
  void solve_inplace(double* b) const;
  bool singular() const { return singular_; }

private:
  int n_, kl_, ku_, ldab_;
  std::vector<double> fac_;
  std::vector<int> ipiv_;
  bool singular_ = false;
};

} // namespace dwlab
