#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dwlab/grid.hpp"

namespace dwlab::testing {

inline std::vector<std::complex<double>> random_cx(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<std::complex<double>> v(n);
  for (auto& x : v) x = {dist(rng), dist(rng)};
  return v;
}

inline std::vector<double> random_real(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

// smooth compactly supported bump, unit height, support radius R0
inline double bump(double r, double R0) {
  const double x = r / R0;
  return x < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
}

inline std::vector<double> bump_vec(const SectorGrid& g, double R0,
                                    double amp = 1.0) {
  std::vector<double> v(g.n);
  for (int j = 0; j < g.n; ++j) v[j] = amp * bump(g.r[j], R0);
  return v;
}

inline std::vector<double> gaussian_vec(const SectorGrid& g, double sigma,
                                        double center = 0.0, double amp = 1.0) {
  std::vector<double> v(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double x = (g.r[j] - center) / sigma;
    v[j] = amp * std::exp(-0.5 * x * x);
  }
  return v;
}

inline double rel_err(const SectorGrid& g, const std::vector<std::complex<double>>& a,
                      const std::vector<std::complex<double>>& b) {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < g.n; ++j) {
    num += g.q[j] * std::norm(a[j] - b[j]);
    den += g.q[j] * std::norm(b[j]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace dwlab::testing
