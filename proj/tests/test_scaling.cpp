#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwlab/scaling.hpp"
#include "helpers.hpp"

using namespace dwlab;

namespace {
CoefficientProfile perturbed_profile(int d = 3) {
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

ScanConfig small_scan() {
  ScanConfig sc;
  sc.n_grid = 1024;
  sc.grid_r_max = 60.0;
  sc.ell_max = 1;
  sc.ray.r_lo = 3e-3;
  sc.ray.r_hi = 0.3;
  sc.ray.count = 7;
  sc.domain = DomainPolicy::Scaled;
  return sc;
}
} // namespace

TEST_CASE("loglog fit recovers exact power laws") {
  std::vector<double> x, y;
  for (int i = 0; i < 9; ++i) {
    const double xi = 1e-3 * std::pow(10.0, i / 3.0);
    x.push_back(xi);
    y.push_back(2.7 * std::pow(xi, -1.35));
  }
  auto fit = fit_loglog(x, y, 0);
  CHECK(fit.slope == doctest::Approx(-1.35).epsilon(1e-10));
  CHECK(fit.residual < 1e-12);
  // dropping the largest x keeps the slope here
  auto fit2 = fit_loglog(x, y, 2);
  CHECK(fit2.npts == 7);
  CHECK(fit2.slope == doctest::Approx(-1.35).epsilon(1e-10));
}

TEST_CASE("geometric samples are sorted and hit the endpoints") {
  auto s = geometric_samples(1e-3, 0.3, 12);
  REQUIRE(s.size() == 12);
  CHECK(s.front() == doctest::Approx(1e-3));
  CHECK(s.back() == doctest::Approx(0.3));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
}

TEST_CASE("exponent formulas") {
  CHECK(predicted_exponent_single(3, 0) == 0.0);
  CHECK(predicted_exponent_single(3, 1) == 0.0);
  CHECK(predicted_exponent_single(3, 2) == -1.0);
  CHECK(predicted_exponent_single(4, 5) == -3.0);
  CHECK(predicted_exponent_diff(3, 0.5, 1) == 0.0);
  CHECK(predicted_exponent_diff(3, 0.5, 2) == doctest::Approx(-0.5));
  CHECK(predicted_exponent_diff(4, 0.5, 5) == doctest::Approx(-2.5));
}

TEST_CASE("free profile, n = 0: bounded weighted norm") {
  auto prof = free_profile();
  auto sc = small_scan();
  auto rep = scan_resolvent(prof, sc, DerivTarget{0, true}, 1.6, 1.6, 0.0,
                            "free n=0");
  CHECK(rep.verdict == Verdict::CONSISTENT);
  CHECK(rep.fit.slope >= -0.1);
  CHECK(rep.ratio_max_min < 3.0);
}

TEST_CASE("perturbed difference scan passes the slope bound") {
  auto prof = perturbed_profile();
  auto sc = small_scan();
  const double pred = predicted_exponent_diff(3, sc.rho1, 3);
  auto rep = scan_resolvent(prof, sc, DiffTarget{3}, 5.0, 5.0, pred, "diff n=3");
  CHECK(rep.verdict == Verdict::CONSISTENT);
  CHECK(rep.fit.slope >= pred - sc.slope_tol);
}

TEST_CASE("monotonicity in n at fixed weights") {
  auto prof = perturbed_profile();
  const double delta = 6.6;
  const cxd z{0.0, 0.05};
  double prev = -1.0;
  for (int n : {0, 1, 2, 3}) {
    auto w = weighted_norm(prof, 1024, 120.0, delta, DerivTarget{n, false},
                           delta, z, 0, {});
    if (prev >= 0.0) CHECK(w.value >= prev * 0.999);
    prev = w.value;
  }
}

TEST_CASE("argmax sector is ell = 0 at low frequency") {
  auto prof = perturbed_profile();
  auto sc = small_scan();
  sc.ell_max = 2;
  sc.ray.r_lo = 5e-3;
  sc.ray.r_hi = 0.04;
  sc.ray.count = 3;
  auto rep = scan_resolvent(prof, sc, DerivTarget{2, false}, 4.6, 4.6,
                            predicted_exponent_single(3, 2), "argmax probe");
  for (auto& s : rep.samples) {
    REQUIRE(s.ok);
    CHECK(s.argmax_ell == 0);
  }
}

TEST_CASE("refinement invariance of the measured norm") {
  auto prof = perturbed_profile();
  const cxd z{0.0, 0.05};
  auto a = weighted_norm(prof, 1024, 120.0, 4.6, DiffTarget{2}, 4.6, z, 0, {});
  auto b = weighted_norm(prof, 2048, 120.0, 4.6, DiffTarget{2}, 4.6, z, 0, {});
  CHECK(std::abs(a.value - b.value) / b.value < 0.05);
}

TEST_CASE("weight scan: trivial s = 0 and the s = 1 oracle") {
  auto prof = free_profile();
  auto sc = small_scan();
  sc.n_grid = 512;
  sc.ell_max = 1;
  sc.domain = DomainPolicy::Fixed;

  auto rep0 = scan_weight(prof, sc, 0.0, 1.5);
  CHECK(std::abs(rep0.fit.slope) < 0.05);
  for (auto& s : rep0.samples)
    if (s.ok) CHECK(s.value <= 1.0 + 1e-9);

  auto rep1 = scan_weight(prof, sc, 1.0, 1.5);
  CHECK(rep1.verdict == Verdict::CONSISTENT);
  CHECK(rep1.fit.slope == doctest::Approx(1.0).epsilon(0.15));

  // dense SVD oracle at two sample frequencies
  auto grid = SectorGrid::make(3, 0, sc.grid_r_max, 512);
  auto eig = SectorEigen::get(grid);
  for (double r : {0.02, 0.1}) {
    std::vector<double> wdiag(grid.n);
    for (int j = 0; j < grid.n; ++j)
      wdiag[j] = std::pow(1.0 + grid.r[j] * grid.r[j], -0.75);
    const double r2 = r * r;
    ApplyOp op;
    op.apply = [eig, wdiag, r2](const std::vector<cxd>& x) {
      std::vector<cxd> y;
      eig->apply_multiplier(
          [r2](double lam) {
            return std::pow(1.0 + std::max(lam, 0.0) / r2, -0.5);
          },
          x, y);
      kern::diag_mul(wdiag.data(), y.data(), y.data(), y.size());
      return y;
    };
    op.apply_adj = [eig, wdiag, r2](const std::vector<cxd>& x) {
      std::vector<cxd> t(x.size());
      kern::diag_mul(wdiag.data(), x.data(), t.data(), x.size());
      std::vector<cxd> y;
      eig->apply_multiplier(
          [r2](double lam) {
            return std::pow(1.0 + std::max(lam, 0.0) / r2, -0.5);
          },
          t, y);
      return y;
    };
    auto pi = operator_norm(grid, op, {});
    const double oracle = dense_norm_oracle(grid, op);
    CHECK(pi.value == doctest::Approx(oracle).epsilon(2e-3));
  }
}

TEST_CASE("weight scan flags a violated hypothesis as inconclusive") {
  auto prof = free_profile();
  auto sc = small_scan();
  sc.n_grid = 512;
  sc.domain = DomainPolicy::Fixed;
  auto rep = scan_weight(prof, sc, 1.0, 0.5); // delta < s
  CHECK(rep.verdict == Verdict::INCONCLUSIVE);
  CHECK(rep.note.find("hypothesis") != std::string::npos);
}

TEST_CASE("theta scans") {
  auto sc = small_scan();
  sc.n_grid = 1024;
  sc.ell_max = 1;
  sc.domain = DomainPolicy::Fixed; // theta norms carry their own smallness
  const double rho = 0.5;

  // free profile: theta_0 vanishes identically
  auto rep_free = scan_theta(free_profile(), sc, 0, rho);
  CHECK(rep_free.verdict == Verdict::CONSISTENT);
  CHECK(rep_free.note.find("zero") != std::string::npos);

  auto prof = perturbed_profile();
  for (int sigma : {0, 1, 2}) {
    auto rep = scan_theta(prof, sc, sigma, rho);
    INFO("sigma=", sigma, " slope=", rep.fit.slope);
    CHECK(rep.verdict == Verdict::CONSISTENT);
    CHECK(rep.fit.slope >= sigma + rho - sc.slope_tol);
  }
  // preconditions
  CHECK_THROWS(scan_theta(prof, sc, 3, rho));
  CHECK_THROWS(scan_theta(prof, sc, 1, 1.5));
}

TEST_CASE("verdict semantics: violation only below predicted - tol") {
  ScalingReport rep;
  // synthesized via the fit path: use fit_loglog directly
  std::vector<double> x{0.001, 0.01, 0.1}, y;
  for (double xi : x) y.push_back(std::pow(xi, -2.0)); // slope -2
  rep.fit = fit_loglog(x, y, 0);
  CHECK(rep.fit.slope == doctest::Approx(-2.0));
  // a scan with predicted -1.5 and tol 0.15 must flag slope -2
  auto prof = perturbed_profile();
  auto sc = small_scan();
  sc.ray.count = 5;
  auto good = scan_resolvent(prof, sc, DiffTarget{2}, 4.6, 4.6,
                             predicted_exponent_diff(3, sc.rho1, 2), "ok");
  CHECK(good.verdict == Verdict::CONSISTENT);
  // an absurd prediction makes the same data a violation
  auto bad = scan_resolvent(prof, sc, DiffTarget{2}, 4.6, 4.6, 1.5, "bad");
  CHECK(bad.verdict == Verdict::VIOLATION);
}
