#include "dwlab/free_wave.hpp"

#include <cmath>
#include <stdexcept>

namespace dwlab {

double support_radius(const SectorGrid& grid, const std::vector<double>& f,
                      const std::vector<double>& g, double rel_tol) {
  double amax = 0.0;
  for (int j = 0; j < grid.n; ++j)
    amax = std::max(amax, std::abs(f[j]) + std::abs(g[j]));
  if (amax == 0.0) return 0.0;
  double rad = 0.0;
  for (int j = 0; j < grid.n; ++j)
    if (std::abs(f[j]) + std::abs(g[j]) > rel_tol * amax) rad = grid.r[j];
  return rad;
}

FreePropagator::FreePropagator(std::shared_ptr<const SectorEigen> eig)
    : eig_(std::move(eig)) {}

std::vector<double> FreePropagator::apply_cos(const std::vector<double>& f,
                                              double t) const {
  return eig_->apply_multiplier(
      [t](double lam) { return std::cos(t * std::sqrt(std::max(lam, 0.0))); }, f);
}

std::vector<double> FreePropagator::apply_sinc(const std::vector<double>& g,
                                               double t) const {
  return eig_->apply_multiplier(
      [t](double lam) {
        const double w = std::sqrt(std::max(lam, 0.0));
        return w < 1e-14 ? t : std::sin(t * w) / w;
      },
      g);
}

std::vector<double> FreePropagator::apply_cos_dt(const std::vector<double>& f,
                                                 double t) const {
  return eig_->apply_multiplier(
      [t](double lam) {
        const double w = std::sqrt(std::max(lam, 0.0));
        return -w * std::sin(t * w);
      },
      f);
}

std::vector<double> FreePropagator::apply_sinc_dt(const std::vector<double>& g,
                                                  double t) const {
  return eig_->apply_multiplier(
      [t](double lam) { return std::cos(t * std::sqrt(std::max(lam, 0.0))); }, g);
}

WaveState FreePropagator::solution(const std::vector<double>& f0,
                                   const std::vector<double>& g0, double t) const {
  WaveState s;
  s.t = t;
  s.u = apply_cos(f0, t);
  const auto us = apply_sinc(g0, t);
  s.v = apply_cos_dt(f0, t);
  const auto vs = apply_sinc_dt(g0, t);
  for (int j = 0; j < grid().n; ++j) {
    s.u[j] += us[j];
    s.v[j] += vs[j];
  }
  return s;
}

double FreePropagator::energy(const WaveState& s) const {
  // <(-Delta) u, u> + ||v||^2 through the spectral coefficients
  const auto& grid = eig_->grid();
  std::vector<double> cu(grid.n), cv(grid.n);
  eig_->to_coeffs(s.u.data(), cu.data());
  eig_->to_coeffs(s.v.data(), cv.data());
  double e = 0.0;
  const auto& lam = eig_->lambdas();
  for (int k = 0; k < grid.n; ++k)
    e += std::max(lam[k], 0.0) * cu[k] * cu[k] + cv[k] * cv[k];
  return e;
}

WaveState free_solution(const SectorGrid& grid, const std::vector<double>& f0,
                        const std::vector<double>& g0, double t) {
  const double rad = support_radius(grid, f0, g0);
  if (rad + std::abs(t) >= grid.r_max)
    throw std::invalid_argument(
        "free_solution: support + t reaches r_max (boundary reflection)");
  FreePropagator prop(SectorEigen::get(grid));
  return prop.solution(f0, g0, t);
}

double huygens_residual(const SectorGrid& grid, const std::vector<double>& f0,
                        const std::vector<double>& g0, double R, double t) {
  if (grid.d % 2 == 0)
    throw std::invalid_argument(
        "huygens_residual: strong Huygens needs odd dimension");
  if (t < 2.0 * R)
    throw std::invalid_argument("huygens_residual: t >= 2R required");
  const double rad = support_radius(grid, f0, g0, 1e-13);
  if (rad > R * (1.0 + 1e-9))
    throw std::invalid_argument("huygens_residual: data not supported in B(R)");
  auto state = free_solution(grid, f0, g0, t);
  const double local = norm_ball(grid, to_cx(state.u), R);
  // H^1 x L^2 size of the data
  FreePropagator prop(SectorEigen::get(grid));
  WaveState init{0.0, f0, g0};
  const double datan = std::sqrt(prop.energy(init) +
                                 std::pow(norm(grid, to_cx(f0)), 2));
  return datan > 0.0 ? local / datan : 0.0;
}

} // namespace dwlab
