#pragma once

#include <functional>
#include <memory>

#include "dwlab/grid.hpp"
#include "dwlab/operators.hpp"

namespace dwlab {

// Full eigendecomposition of the discrete free sector Laplacian -Delta^(ell).
// The operator is similar to a symmetric tridiagonal matrix via D = diag(q^1/2);
// eigenvectors are stored l2-orthonormal in the symmetrized frame, so
// e_k = D^{-1} z_k are orthonormal in the measure inner product.
class SectorEigen {
public:
  explicit SectorEigen(const SectorGrid& grid);

  const SectorGrid& grid() const { return grid_; }
  const std::vector<double>& lambdas() const { return lambda_; }

  // c_k = <e_k, x>_q  and  x = sum_k c_k e_k
  void to_coeffs(const double* x, double* c) const;
  void from_coeffs(const double* c, double* x) const;

  // y = f(-Delta) x for a real spectral multiplier, complex vectors handled
  // componentwise
  void apply_multiplier(const std::function<double(double)>& f,
                        const std::vector<cxd>& x, std::vector<cxd>& y) const;
  std::vector<double> apply_multiplier(const std::function<double(double)>& f,
                                       const std::vector<double>& x) const;

  // cached access; keeps at most a few decompositions alive
  static std::shared_ptr<const SectorEigen> get(const SectorGrid& grid);
  static void clear_cache();

private:
  SectorGrid grid_;
  std::vector<double> lambda_;
  std::vector<double> z_; // n x n column-major
  std::vector<double> sq_, isq_;
};

// Selected eigenpairs of a measure-symmetric real tridiagonal sector operator
// in the eigenvalue window [vl, vu]; returns measure-orthonormal vectors.
struct RangedEig {
  std::vector<double> lambda;
  std::vector<std::vector<double>> vecs;
};
RangedEig ranged_eig_measure(const SectorOperator& op, double vl, double vu);

// H_r^s scale on a sector: norm |<D_r>^s u| with D_r = sqrt(-Delta)/r.
class SobolevScale {
public:
  SobolevScale(std::shared_ptr<const SectorEigen> eig, double r);

  double r() const { return r_; }
  const SectorEigen& eig() const { return *eig_; }

  std::vector<cxd> apply(double s, const std::vector<cxd>& x) const;
  double norm_hs(double s, const std::vector<cxd>& x) const;

private:
  std::shared_ptr<const SectorEigen> eig_;
  double r_;
};

SobolevScale sobolev_scale(const SectorGrid& grid, double r);

} // namespace dwlab
