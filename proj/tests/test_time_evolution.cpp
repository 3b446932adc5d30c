#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwlab/experiment.hpp"
#include "dwlab/time_evolution.hpp"
#include "helpers.hpp"

using namespace dwlab;
using namespace dwlab::testing;

namespace {
CoefficientProfile damped_profile(int d = 3) {
  ProfileConfig pc;
  pc.d = d;
  pc.g_amp = 0.3;
  pc.w_amp = 0.2;
  pc.a_amp = 0.2;
  return CoefficientProfile::build(pc);
}
CoefficientProfile free_profile(int d = 3) {
  ProfileConfig pc;
  pc.d = d;
  return CoefficientProfile::build(pc);
}
} // namespace

TEST_CASE("free metric stepper matches the spectral solution") {
  auto prof = free_profile();
  auto g = SectorGrid::make(3, 0, 25.0, 2048);
  // smooth, low-frequency data keeps the Crank-Nicolson phase error tiny
  auto f = gaussian_vec(g, 2.0);
  auto h = gaussian_vec(g, 2.5, 0.0, 0.3);
  auto states = evolve(prof, g, f, h, {10.0}, 1e-3);
  REQUIRE(states.size() == 1);
  auto exact = free_solution(g, f, h, 10.0);
  CHECK(rel_err(g, to_cx(states[0].u), to_cx(exact.u)) < 1e-6);
}

TEST_CASE("modified energy stays inside the quasi-contraction envelope") {
  auto prof = damped_profile();
  auto g = SectorGrid::make(3, 0, 40.0, 2048);
  const double dt = 2e-3, eps = 0.02;
  WaveEvolver ev(prof, g, dt);
  auto f = bump_vec(g, 1.0);
  auto h = bump_vec(g, 0.8, 0.6);
  const double nu = 2.0 * eps * std::sqrt(prof.w_min());
  WaveState s{0.0, f, {}};
  s.v.resize(g.n);
  for (int j = 0; j < g.n; ++j) s.v[j] = prof.w(g.r[j]) * h[j];
  const double e0 = ev.modified_energy(s, nu);
  double prev_bound = e0;
  for (int step = 0; step < 8000; ++step) {
    ev.step(s);
    if (step % 500 == 0) {
      const double e = ev.modified_energy(s, nu);
      CHECK(e <= e0 * std::exp(2.0 * eps * s.t) * (1.0 + 1e-9));
      prev_bound = e;
    }
  }
  CHECK(prev_bound <= e0 * std::exp(2.0 * eps * s.t));
}

TEST_CASE("finite propagation speed") {
  auto prof = damped_profile();
  auto g = SectorGrid::make(3, 0, 30.0, 2048);
  auto f = bump_vec(g, 1.0);
  auto h = bump_vec(g, 1.0, 0.5);
  auto states = evolve(prof, g, f, h, {5.0}, 1e-3);
  const auto& s = states[0];
  WaveEvolver ev(prof, g, 1e-3);
  const double rout = 1.0 + ev.gamma() * 5.0 + 1.0;
  double outside = 0.0, total = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double m = g.q[j] * s.u[j] * s.u[j];
    total += m;
    if (g.r[j] > rout) outside += m;
  }
  CHECK(std::sqrt(outside / total) <= 1e-8);
}

TEST_CASE("domain guard refuses short domains") {
  auto prof = damped_profile();
  auto g = SectorGrid::make(3, 0, 10.0, 512);
  auto f = bump_vec(g, 1.0);
  std::vector<double> zero(g.n, 0.0);
  CHECK_THROWS(evolve(prof, g, f, zero, {20.0}, 1e-3));
}

TEST_CASE("initial data mapping round trip") {
  auto prof = damped_profile();
  auto g = SectorGrid::make(3, 0, 20.0, 512);
  auto f = bump_vec(g, 1.0);
  auto h = bump_vec(g, 0.7, 0.4);
  auto g0 = initial_data_g0(prof, g, f, h);
  // F_z at z = 0 equals a w f + w g = g0
  for (int j = 0; j < g.n; ++j) {
    const double w = prof.w(g.r[j]);
    const double fz0 = prof.a(g.r[j]) * w * f[j] + w * h[j];
    CHECK(std::abs(fz0 - g0[j]) <= 1e-14 * (1.0 + std::abs(g0[j])));
  }
}

TEST_CASE("free profile comparison: u - u0 vanishes to stepping error") {
  auto prof = free_profile();
  auto g = SectorGrid::make(3, 0, 30.0, 2048);
  auto f = gaussian_vec(g, 2.0);
  std::vector<double> zero(g.n, 0.0);
  ProfileCompareOptions opts;
  opts.dt = 1e-3;
  opts.t_samples = {2.0, 6.0, 10.0};
  opts.t_lo = 2.0;
  opts.t_hi = 10.0;
  auto rep = profile_comparison(prof, g, f, zero, opts);
  for (std::size_t i = 0; i < rep.series.t.size(); ++i)
    CHECK(rep.series.norm_diff[i] <=
          1e-6 * (rep.series.norm_weighted[i] + 1e-30));
}

TEST_CASE("fourier synthesis agrees with the stepper") {
  auto prof = damped_profile();
  auto g = SectorGrid::make(3, 0, 20.0, 1024);
  auto f = bump_vec(g, 1.0);
  auto h = bump_vec(g, 0.9, 0.5);
  SynthesisOptions opts;
  opts.tau_max = 30.0;
  opts.dtau = 0.01;
  opts.dt_evolve = 1e-3;
  auto res = fourier_synthesis_crosscheck(prof, g, f, h, 0.5, {0.5, 2.0}, opts);
  CHECK(res.converged);
  for (double dev : res.deviation) CHECK(dev <= 0.02);

  // free profile: synthesis against the spectral free solution
  auto prof0 = free_profile();
  auto res0 =
      fourier_synthesis_crosscheck(prof0, g, f, h, 0.5, {2.0}, opts);
  auto exact = free_solution(g, f, h, 2.0);
  CHECK(rel_err(g, to_cx(res0.u_synth[0]), to_cx(exact.u)) <= 0.02);
}

TEST_CASE("synthesis is mu independent") {
  auto prof = damped_profile();
  auto g = SectorGrid::make(3, 0, 20.0, 1024);
  auto f = bump_vec(g, 1.0);
  auto h = bump_vec(g, 0.9, 0.5);
  SynthesisOptions opts;
  opts.tau_max = 30.0;
  opts.dtau = 0.01;
  auto r1 = fourier_synthesis_crosscheck(prof, g, f, h, 0.5, {2.0}, opts);
  auto r2 = fourier_synthesis_crosscheck(prof, g, f, h, 0.25, {2.0}, opts);
  CHECK(rel_err(g, to_cx(r1.u_synth[0]), to_cx(r2.u_synth[0])) <= 0.02);
}

TEST_CASE("compact bump helper is compactly supported") {
  auto g = SectorGrid::make(3, 0, 20.0, 512);
  auto f = compact_bump(g, 1.5, 2.0);
  for (int j = 0; j < g.n; ++j) {
    if (g.r[j] >= 1.5) CHECK(f[j] == 0.0);
  }
  CHECK(support_radius(g, f, f) <= 1.5);
}
