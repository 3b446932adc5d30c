#pragma once

#include <stdexcept>
#include <vector>

namespace dwlab {

// Uniform radial grid for one spherical-harmonic sector. Nodes r_j = j*h,
// j = 1..n with h = r_max/(n+1); Dirichlet truncation at r_max. The inner
// product is the quadrature form <u,v> = sum_j q_j u_j conj(v_j) with
// q_j = r_j^{d-1} h, which realizes the L^2(R^d) pairing sector-wise.
struct SectorGrid {
  int d = 3;
  int ell = 0;
  double r_max = 0.0;
  int n = 0;
  double h = 0.0;
  std::vector<double> r;
  std::vector<double> q;

  static SectorGrid make(int d, int ell, double r_max, int n) {
    if (d < 3) throw std::invalid_argument("SectorGrid: d >= 3 required");
    if (ell < 0) throw std::invalid_argument("SectorGrid: ell >= 0 required");
    if (n < 2 || r_max <= 0.0) throw std::invalid_argument("SectorGrid: bad size");
    SectorGrid g;
    g.d = d;
    g.ell = ell;
    g.r_max = r_max;
    g.n = n;
    g.h = r_max / (n + 1);
    g.r.resize(n);
    g.q.resize(n);
    for (int j = 0; j < n; ++j) {
      g.r[j] = (j + 1) * g.h;
      double p = 1.0;
      for (int k = 0; k < d - 1; ++k) p *= g.r[j];
      g.q[j] = p * g.h;
    }
    return g;
  }

  bool same_shape(const SectorGrid& o) const {
    return d == o.d && ell == o.ell && n == o.n && r_max == o.r_max;
  }
};

} // namespace dwlab
