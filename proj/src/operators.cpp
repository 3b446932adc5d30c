#include "dwlab/operators.hpp"

#include <cmath>

namespace dwlab {

namespace {
double rpow(double r, int p) {
  double v = 1.0;
  for (int k = 0; k < p; ++k) v *= r;
  return v;
}
} // namespace

SectorOperator assemble_divform(const std::function<double(double)>& geff,
                                const SectorGrid& grid) {
  const int n = grid.n, d = grid.d, ell = grid.ell;
  const double h = grid.h, h2 = h * h;
  BandedMatrix m(n, 1, 1);
  const double cent = static_cast<double>(ell) * (ell + d - 2);
  for (int j = 0; j < n; ++j) {
    const double rj = grid.r[j];
    const double rm = rj - 0.5 * h, rp = rj + 0.5 * h;
    const double cm = geff(rm) * rpow(rm, d - 1);
    const double cp = geff(rp) * rpow(rp, d - 1);
    const double scale = 1.0 / (rpow(rj, d - 1) * h2);
    double diag = -(cp + cm) * scale;
    if (j == 0) {
      // inner face: reflection (zero flux) for ell = 0, Dirichlet otherwise
      if (ell == 0) diag = -cp * scale;
    } else {
      m.at(j, j - 1) = cm * scale;
    }
    if (j + 1 < n) m.at(j, j + 1) = cp * scale;
    m.at(j, j) = diag - cent * geff(rj) / (rj * rj);
  }
  return {grid, std::move(m), Symmetry::SelfadjointInMeasure};
}

SectorOperator assemble_laplacian(const CoefficientProfile& profile,
                                  const SectorGrid& grid) {
  return assemble_divform([&profile](double r) { return profile.g(r); }, grid);
}

SectorOperator assemble_free_laplacian(const SectorGrid& grid) {
  return assemble_divform([](double) { return 1.0; }, grid);
}

SectorOperator assemble_multiplier(const std::function<double(double)>& fn,
                                   const SectorGrid& grid) {
  BandedMatrix m(grid.n, 0, 0);
  for (int j = 0; j < grid.n; ++j) m.at(j, j) = fn(grid.r[j]);
  return {grid, std::move(m), Symmetry::SelfadjointInMeasure};
}

SectorOperator assemble_multiplier_cx(const std::function<cxd(double)>& fn,
                                      const SectorGrid& grid) {
  BandedMatrix m(grid.n, 0, 0);
  for (int j = 0; j < grid.n; ++j) m.at(j, j) = fn(grid.r[j]);
  return {grid, std::move(m), Symmetry::General};
}

SectorOperator assemble_dilation_generator(const SectorGrid& grid) {
  const int n = grid.n;
  const cxd mi{0.0, -1.0};
  BandedMatrix m(n, 1, 1);
  const double half_d = 0.5 * grid.d;
  for (int j = 0; j < n; ++j) {
    m.at(j, j) = mi * half_d;
    const double c = grid.r[j] / (2.0 * grid.h);
    if (j > 0) m.at(j, j - 1) = -mi * c;
    if (j + 1 < n) m.at(j, j + 1) = mi * c;
  }
  // origin ghost: even reflection for ell = 0 (regular solutions have
  // u'(0) = 0), Dirichlet for ell >= 1
  if (grid.ell == 0) m.at(0, 0) -= mi * (grid.r[0] / (2.0 * grid.h));
  return {grid, std::move(m), Symmetry::General};
}

cxd inner(const SectorGrid& g, const std::vector<cxd>& u, const std::vector<cxd>& v) {
  // <u, v> = sum q conj(v) u, linear in the first argument
  return kern::dot_w(g.q.data(), v.data(), u.data(), u.size());
}

double norm(const SectorGrid& g, const std::vector<cxd>& u) {
  return std::sqrt(std::abs(kern::dot_w(g.q.data(), u.data(), u.data(), u.size())));
}

double norm_ball(const SectorGrid& g, const std::vector<cxd>& u, double radius) {
  double s = 0.0;
  for (int j = 0; j < g.n && g.r[j] <= radius; ++j) s += g.q[j] * std::norm(u[j]);
  return std::sqrt(s);
}

double norm_weighted(const SectorGrid& g, const std::vector<cxd>& u, double delta) {
  double s = 0.0;
  for (int j = 0; j < g.n; ++j)
    s += g.q[j] * std::pow(1.0 + g.r[j] * g.r[j], -delta) * std::norm(u[j]);
  return std::sqrt(s);
}

std::vector<cxd> to_cx(const std::vector<double>& x) {
  std::vector<cxd> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i];
  return y;
}

} // namespace dwlab
