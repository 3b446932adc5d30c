#pragma once

#include <memory>

#include "dwlab/spectral.hpp"

namespace dwlab {

// state of the first-order system on one sector; v = w * du/dt (v = du/dt in
// the free case, where w = 1)
struct WaveState {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;
};

// support radius of the data pair: largest node where |f| + |g| exceeds
// rel_tol * max
double support_radius(const SectorGrid& grid, const std::vector<double>& f,
                      const std::vector<double>& g, double rel_tol = 1e-12);

// Spectral realization of the free wave group on one sector: exact in time
// through the eigendecomposition of -Delta^(ell).
class FreePropagator {
public:
  explicit FreePropagator(std::shared_ptr<const SectorEigen> eig);

  const SectorGrid& grid() const { return eig_->grid(); }

  std::vector<double> apply_cos(const std::vector<double>& f, double t) const;
  // sin(t sqrt(-Delta)) / sqrt(-Delta), with the t-limit at lambda = 0
  std::vector<double> apply_sinc(const std::vector<double>& g, double t) const;
  // d/dt of the two propagators
  std::vector<double> apply_cos_dt(const std::vector<double>& f, double t) const;
  std::vector<double> apply_sinc_dt(const std::vector<double>& g, double t) const;

  WaveState solution(const std::vector<double>& f0, const std::vector<double>& g0,
                     double t) const;

  // (|grad u|^2 + |v|^2) in the measure inner product
  double energy(const WaveState& s) const;

private:
  std::shared_ptr<const SectorEigen> eig_;
};

// u_0(t) on the sector; rejects data whose support could reach the boundary
// within time t (a reflection there would corrupt the comparisons)
WaveState free_solution(const SectorGrid& grid, const std::vector<double>& f0,
                        const std::vector<double>& g0, double t);

// ||u_0(t)||_{L^2(B(R))} / ||(f0,g0)||_{H^1 x L^2}; requires odd d, support
// in B(R) and t >= 2R (strong Huygens regime)
double huygens_residual(const SectorGrid& grid, const std::vector<double>& f0,
                        const std::vector<double>& g0, double R, double t);

} // namespace dwlab
