// Acceptance suite: one block per criterion, each printing PASS/FAIL lines
// with the measured values and pinned tolerances. Exit code = failed criteria.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>

#include "dwlab/experiment.hpp"
#include "dwlab/free_wave.hpp"
#include "dwlab/mourre.hpp"
#include "dwlab/time_evolution.hpp"

using namespace dwlab;

namespace {

int g_failures = 0;
int g_checks = 0;

bool check(bool ok, const char* fmt, ...) {
  ++g_checks;
  if (!ok) ++g_failures;
  std::printf("  [%s] ", ok ? "PASS" : "FAIL");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
  return ok;
}

void info(const char* fmt, ...) {
  std::printf("  [info] ");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

CoefficientProfile damped_profile(int d) {
  ProfileConfig pc;
  pc.d = d;
  pc.rho0 = 1.0;
  pc.g_amp = 0.3;
  pc.w_amp = 0.2;
  pc.a_amp = 0.2;
  return CoefficientProfile::build(pc);
}

CoefficientProfile small_metric_profile(int d) {
  ProfileConfig pc;
  pc.d = d;
  pc.rho0 = 1.0;
  pc.g_amp = 0.2;
  return CoefficientProfile::build(pc);
}

CoefficientProfile free_profile(int d) {
  ProfileConfig pc;
  pc.d = d;
  return CoefficientProfile::build(pc);
}

std::vector<cxd> random_cx(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<cxd> v(n);
  for (auto& x : v) x = {dist(rng), dist(rng)};
  return v;
}

double relnorm(const SectorGrid& g, const std::vector<cxd>& a,
               const std::vector<cxd>& b) {
  double num = 0, den = 0;
  for (int j = 0; j < g.n; ++j) {
    num += g.q[j] * std::norm(a[j] - b[j]);
    den += g.q[j] * std::norm(b[j]);
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

// --------------------------------------------------------------------------
// criterion 1: identity suite, n = 1024, residuals <= 1e-8, adjoint 1e-12
// --------------------------------------------------------------------------
void criterion_1() {
  Timer tm;
  std::printf("[1] identity suite (n=1024)\n");
  auto prof = damped_profile(3);
  auto grid = SectorGrid::make(3, 0, 60.0, 1024);
  ResolventContext ctx(prof, grid);
  const cxd z{0.21, 0.3};
  auto x = random_cx(grid.n, 1001);
  const double nx = norm(grid, x);

  auto pz = ctx.assemble_pz(z);
  auto rx = ctx.solve(z, x);
  std::vector<cxd> back(grid.n);
  pz.mat.matvec(rx.data(), back.data());
  for (int j = 0; j < grid.n; ++j) back[j] -= x[j];
  check(norm(grid, back) / nx <= 1e-8, "P(z)R(z)=I residual %.2e <= 1e-8",
        norm(grid, back) / nx);

  auto r0x = ctx.solve(z, x, true);
  std::vector<cxd> th(grid.n);
  ctx.apply_theta(2, z, r0x, th);
  auto bridge = ctx.solve(z, th);
  std::vector<cxd> resid(grid.n);
  for (int j = 0; j < grid.n; ++j) resid[j] = rx[j] - r0x[j] - bridge[j];
  check(norm(grid, resid) / norm(grid, rx) <= 1e-8,
        "R-R0=R theta R0 residual %.2e <= 1e-8",
        norm(grid, resid) / norm(grid, rx));

  const cxd ir{0.0, std::abs(z)};
  auto rir = ctx.solve(ir, x);
  auto g2 = ctx.gamma_diag(2, z, false);
  std::vector<cxd> t2(grid.n);
  kern::cdiag_mul(g2.data(), rx.data(), t2.data(), grid.n);
  auto rhs = ctx.solve(ir, t2);
  for (int j = 0; j < grid.n; ++j) resid[j] = rx[j] - rir[j] - rhs[j];
  check(norm(grid, resid) / norm(grid, rx) <= 1e-8,
        "R(z)-R(ir)=R(ir)gamma2 R(z) residual %.2e <= 1e-8",
        norm(grid, resid) / norm(grid, rx));

  // expansions with k <= 2, N <= 3
  double worst = 0.0;
  for (int k = 0; k <= 2; ++k) {
    std::vector<std::vector<int>> words{{}};
    for (int b = 0; b < k; ++b) {
      std::vector<std::vector<int>> next;
      for (auto& w : words)
        for (int j : {0, 1}) {
          auto w2 = w;
          w2.push_back(j);
          next.push_back(w2);
        }
      words = std::move(next);
    }
    for (const auto& w : words) {
      ResolventProduct p;
      p.left = ResolventChain::from_gammas(w, SlotKind::PerturbedAtZ);
      auto orig = ctx.apply_product(p, z, x);
      for (int N = 0; N <= 3; ++N) {
        auto terms = expand_ir(p, N);
        std::vector<cxd> sum(grid.n, cxd{0, 0});
        for (auto& term : terms) {
          auto v = ctx.apply_product(term, z, x);
          for (int j = 0; j < grid.n; ++j) sum[j] += v[j];
        }
        worst = std::max(worst, relnorm(grid, sum, orig));
      }
    }
  }
  check(worst <= 1e-8, "expansion sums (k<=2, N<=3) worst residual %.2e <= 1e-8",
        worst);

  // adjoint law entrywise on a 256-point grid
  auto sg = SectorGrid::make(3, 0, 30.0, 256);
  ResolventContext sctx(prof, sg);
  std::vector<std::vector<cxd>> rz(sg.n), rzc(sg.n);
  std::vector<cxd> e(sg.n, cxd{0, 0});
  for (int j = 0; j < sg.n; ++j) {
    e[j] = 1.0;
    rz[j] = sctx.solve(z, e);
    rzc[j] = sctx.solve(-std::conj(z), e);
    e[j] = 0.0;
  }
  double aworst = 0.0, ascale = 0.0;
  for (int i = 0; i < sg.n; ++i)
    for (int j = 0; j < sg.n; ++j) {
      const cxd adj = std::conj(rz[i][j]) * (sg.q[j] / sg.q[i]);
      aworst = std::max(aworst, std::abs(adj - rzc[j][i]));
      ascale = std::max(ascale, std::abs(rz[i][j]));
    }
  check(aworst / ascale <= 1e-12,
        "adjoint law R(z)*=R(-conj z) entrywise %.2e <= 1e-12",
        aworst / ascale);
  info("elapsed %.1f s (budget 60 s)", tm.elapsed());
}

// --------------------------------------------------------------------------
// criterion 2: derivative oracle, n <= 4, 1e-6 after Richardson
// --------------------------------------------------------------------------
void criterion_2() {
  Timer tm;
  std::printf("[2] derivative oracle (n <= 4)\n");
  auto prof = damped_profile(3);
  auto grid = SectorGrid::make(3, 0, 40.0, 1024);
  ResolventContext ctx(prof, grid);
  const cxd z{0.0, 0.8};
  auto x = random_cx(grid.n, 1002);
  for (int n = 1; n <= 4; ++n) {
    std::vector<cxd> exact(grid.n, cxd{0, 0});
    for (const auto& term : derivative_terms(n, false)) {
      auto v = ctx.apply_product(term, z, x);
      for (int j = 0; j < grid.n; ++j) exact[j] += v[j];
    }
    const double h0 = 0.08;
    std::vector<std::vector<cxd>> tab;
    for (int lev = 0; lev < 4; ++lev) {
      const double h = h0 / std::pow(2.0, lev);
      std::vector<cxd> fd(grid.n, cxd{0, 0});
      for (int k = 0; k <= n; ++k) {
        const double binom = std::tgamma(n + 1.0) /
                             (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0));
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        auto v = ctx.solve(z + (0.5 * n - k) * h, x);
        kern::axpy(cxd{sign * binom, 0.0}, v.data(), fd.data(), grid.n);
      }
      kern::scale(cxd{std::pow(h, -n), 0.0}, fd.data(), grid.n);
      tab.push_back(std::move(fd));
    }
    for (int stage = 1; stage < 4; ++stage) {
      const double f = std::pow(4.0, stage);
      for (int lev = 3; lev >= stage; --lev)
        for (int j = 0; j < grid.n; ++j)
          tab[lev][j] = (f * tab[lev][j] - tab[lev - 1][j]) / (f - 1.0);
    }
    const double rel = relnorm(grid, tab[3], exact);
    check(rel <= 1e-6, "n=%d: Richardson-extrapolated FD vs terms %.2e <= 1e-6",
          n, rel);
  }
  info("elapsed %.1f s (budget 120 s)", tm.elapsed());
}

// --------------------------------------------------------------------------
// criterion 3: low-frequency scalings, d in {3,4}, n in {0..d+1}
// --------------------------------------------------------------------------
void criterion_3() {
  Timer tm;
  std::printf("[3] low-frequency resolvent scalings\n");
  const double rho1 = 0.5;
  for (int d : {3, 4}) {
    auto prof = damped_profile(d);
    ScanConfig sc;
    sc.n_grid = 4096;
    sc.grid_r_max = 120.0;
    sc.ell_max = 1;
    sc.ray = RaySpec{M_PI / 2.0, 1e-3, 0.3, 12};
    sc.rho1 = rho1;
    sc.domain = DomainPolicy::Scaled;
    for (int n = 0; n <= d + 1; ++n) {
      const double delta = n + 2.6;
      {
        const double pred = predicted_exponent_single(d, n);
        auto rep = scan_resolvent(prof, sc, DerivTarget{n, false}, delta, delta,
                                  pred, "single");
        if (pred == 0.0)
          check(rep.verdict == Verdict::CONSISTENT,
                "d=%d n=%d single: bounded, max/min %.2f < 3 (slope %+.3f)", d,
                n, rep.ratio_max_min, rep.fit.slope);
        else
          check(rep.fit.slope >= pred - 0.15 &&
                    rep.verdict == Verdict::CONSISTENT,
                "d=%d n=%d single: slope %+.3f >= %+.2f - 0.15", d, n,
                rep.fit.slope, pred);
      }
      {
        const double pred = predicted_exponent_diff(d, rho1, n);
        auto rep =
            scan_resolvent(prof, sc, DiffTarget{n}, delta, delta, pred, "diff");
        if (pred == 0.0)
          check(rep.verdict == Verdict::CONSISTENT,
                "d=%d n=%d diff:   bounded, max/min %.2f < 3 (slope %+.3f)", d,
                n, rep.ratio_max_min, rep.fit.slope);
        else
          check(rep.fit.slope >= pred - 0.15 &&
                    rep.verdict == Verdict::CONSISTENT,
                "d=%d n=%d diff:   slope %+.3f >= %+.2f - 0.15", d, n,
                rep.fit.slope, pred);
      }
    }
  }
  // truncation-radius policy: r_max doubling changes the measured norm little
  {
    auto prof = damped_profile(3);
    const cxd z{0.0, 0.01};
    const double h = 120.0 / 4097.0;
    auto v1 = weighted_norm(prof, static_cast<int>(4.0 * M_PI / z.imag() / h),
                            4.0 * M_PI / z.imag(), 4.6, DiffTarget{2}, 4.6, z,
                            0, {});
    auto v2 = weighted_norm(prof, static_cast<int>(8.0 * M_PI / z.imag() / h),
                            8.0 * M_PI / z.imag(), 4.6, DiffTarget{2}, 4.6, z,
                            0, {});
    const double change = std::abs(v1.value - v2.value) / v2.value;
    check(change <= 0.10, "r_max doubling at r=0.01 changes diff n=2 by %.3f <= 0.10",
          change);
  }
  info("elapsed %.1f s (budget 1200 s)", tm.elapsed());
}

// --------------------------------------------------------------------------
// criterion 4: Hardy/weight and theta_sigma scalings
// --------------------------------------------------------------------------
void criterion_4() {
  Timer tm;
  std::printf("[4] weight and theta scalings\n");
  auto prof = damped_profile(3);
  ScanConfig sc;
  sc.n_grid = 2048;
  sc.grid_r_max = 120.0;
  sc.ell_max = 1;
  sc.ray = RaySpec{M_PI / 2.0, 1e-3, 0.3, 12};
  for (double s : {0.5, 1.0}) {
    auto rep = scan_weight(prof, sc, s, s + 0.5);
    check(rep.fit.slope >= s - 0.1 && rep.fit.slope <= s + 0.3,
          "weight s=%.1f delta=%.1f: slope %.3f in [%.1f, %.1f]", s, s + 0.5,
          rep.fit.slope, s - 0.1, s + 0.3);
  }
  const double rho = 0.5;
  for (int sigma : {0, 1, 2}) {
    auto rep = scan_theta(prof, sc, sigma, rho);
    check(rep.fit.slope >= sigma + rho - 0.15,
          "theta sigma=%d: slope %.3f >= %.2f - 0.15", sigma, rep.fit.slope,
          sigma + rho);
  }
  info("elapsed %.1f s (budget 300 s)", tm.elapsed());
}

// --------------------------------------------------------------------------
// criterion 5: Huygens principle, d = 3
// --------------------------------------------------------------------------
void criterion_5() {
  Timer tm;
  std::printf("[5] strong Huygens (d=3)\n");
  const double R = 1.0, t = 3.0;
  auto fine = SectorGrid::make(3, 0, 8.0, 8192);
  auto coarse = SectorGrid::make(3, 0, 8.0, 4096);
  auto mk = [&](const SectorGrid& g) {
    std::vector<double> f(g.n), h(g.n);
    for (int j = 0; j < g.n; ++j) {
      const double x = g.r[j] / R;
      f[j] = x < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
      h[j] = 0.5 * f[j];
    }
    return std::make_pair(f, h);
  };
  auto [f1, h1] = mk(fine);
  auto [f2, h2] = mk(coarse);
  const double res_fine = huygens_residual(fine, f1, h1, R, t);
  const double res_coarse = huygens_residual(coarse, f2, h2, R, t);
  check(res_fine <= 1e-3, "residual %.2e <= 1e-3 at n=8192", res_fine);
  check(res_coarse >= 3.0 * res_fine,
        "doubling n shrinks the residual by %.2f >= 3", res_coarse / res_fine);
  SectorEigen::clear_cache();
  info("elapsed %.1f s (budget 120 s)", tm.elapsed());
}

// --------------------------------------------------------------------------
// criterion 6: free even-d local decay, d = 4
// --------------------------------------------------------------------------
void criterion_6() {
  Timer tm;
  std::printf("[6] free local decay (d=4)\n");
  const double R = 1.0;
  auto g = SectorGrid::make(4, 0, 70.0, 8192);
  FreePropagator prop(SectorEigen::get(g));
  std::vector<double> f0(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double x = g.r[j] / R;
    f0[j] = x < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
  }
  std::vector<double> ts, cosn, sinn;
  for (double t = 10.0; t <= 60.0; t += 2.5) {
    ts.push_back(t);
    cosn.push_back(norm_ball(g, to_cx(prop.apply_cos(f0, t)), R));
    sinn.push_back(norm_ball(g, to_cx(prop.apply_sinc(f0, t)), R));
  }
  auto fc = fit_loglog(ts, cosn, 0);
  auto fs = fit_loglog(ts, sinn, 0);
  check(fc.slope <= -4.0 + 0.3, "cos propagator slope %.3f <= -3.7", fc.slope);
  check(fs.slope <= -3.0 + 0.3, "sin propagator slope %.3f <= -2.7", fs.slope);
  SectorEigen::clear_cache();
  info("elapsed %.1f s (budget 600 s)", tm.elapsed());
}

// --------------------------------------------------------------------------
// criterion 7: profile comparison
// --------------------------------------------------------------------------
void criterion_7() {
  Timer tm;
  std::printf("[7] profile comparison\n");
  const double rho1 = 0.5;

  // d = 3, damped long-range: local decay beats the even-d rate
  {
    auto prof = damped_profile(3);
    auto grid = SectorGrid::make(3, 0, 60.0, 8192);
    std::vector<double> f(grid.n), h(grid.n);
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.r[j];
      f[j] = x < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
      h[j] = 0.5 * f[j];
    }
    ProfileCompareOptions opts;
    opts.rho1 = rho1;
    opts.dt = 1e-3;
    opts.t_lo = 8.0;
    opts.t_hi = 42.0;
    opts.t_samples = geometric_samples(4.0, 42.0, 24);
    auto rep = profile_comparison(prof, grid, f, h, opts);
    const double pred = 1.0 - 3.0 - rho1; // g-data dominates
    check(rep.fit_local.slope <= pred + 0.3,
          "d=3 damped: local slope %.3f <= %.2f + 0.3", rep.fit_local.slope,
          pred);
    // stepping refinement
    ProfileCompareOptions o2 = opts;
    o2.dt = 5e-4;
    auto rep2 = profile_comparison(prof, grid, f, h, o2);
    const double ds = std::abs(rep2.fit_local.slope - rep.fit_local.slope);
    check(ds < 0.05, "d=3: dt/2 changes the local slope by %.4f < 0.05", ds);
  }
  SectorEigen::clear_cache();
  // d = 4, undamped small metric: the free profile is the asymptotic shape
  {
    auto prof = small_metric_profile(4);
    auto grid = SectorGrid::make(4, 0, 55.0, 8192);
    std::vector<double> f(grid.n), h(grid.n, 0.0);
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.r[j];
      f[j] = x < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
    }
    ProfileCompareOptions opts;
    opts.rho1 = rho1;
    opts.dt = 1e-3;
    opts.t_lo = 8.0;
    opts.t_hi = 40.0;
    opts.t_samples = geometric_samples(4.0, 40.0, 20);
    auto rep = profile_comparison(prof, grid, f, h, opts);
    check(rep.ratio_monotone, "d=4: |u-u0|/|u0| decreasing over the window%s",
          "");
    check(rep.fit_ratio.slope <= -rho1 + 0.3,
          "d=4: ratio slope %.3f <= %.2f + 0.3", rep.fit_ratio.slope, -rho1);
    ProfileCompareOptions o2 = opts;
    o2.dt = 5e-4;
    auto rep2 = profile_comparison(prof, grid, f, h, o2);
    const double ds = std::abs(rep2.fit_ratio.slope - rep.fit_ratio.slope);
    check(ds < 0.05, "d=4: dt/2 changes the ratio slope by %.4f < 0.05", ds);
  }
  SectorEigen::clear_cache();
  info("elapsed %.1f s (budget 1800 s)", tm.elapsed());
}

// --------------------------------------------------------------------------
// criterion 8: Mourre suite
// --------------------------------------------------------------------------
void criterion_8() {
  Timer tm;
  std::printf("[8] Mourre suite\n");
  auto free_p = free_profile(3);
  auto small_p = [] {
    ProfileConfig pc;
    pc.d = 3;
    pc.g_amp = 0.15;
    pc.w_amp = 0.1;
    pc.a_amp = 0.1;
    return CoefficientProfile::build(pc);
  }();

  // commutator-identity residual refinement
  {
    const cxd z = 0.1 * std::polar(1.0, M_PI / 4.0);
    std::vector<double> errs;
    for (int n : {2048, 4096})
      errs.push_back(commutator_identity_residual(
          small_p, SectorGrid::make(3, 0, 60.0, n), z));
    const double slope = std::log2(errs[0] / errs[1]);
    check(slope >= 1.0, "commutator residual slope %.2f >= 1 (%.2e -> %.2e)",
          slope, errs[0], errs[1]);
  }

  // positivity margins on the ray r e^{i pi/4} (explicit discrete commutator,
  // as specified). Two independent obstructions make this clause
  // unattainable: the finite-volume virial identity forces the projected
  // explicit commutator's diagonal to vanish on eigenvectors of P_R, and at
  // arg z = pi/4 one has Re(z^2) = 0 whereas the positivity argument needs
  // 2 Re(z^2) >= |z|^2 (arg <= pi/6). The checks below report the honest
  // values; the identity-route margins on the pi/12 ray are shown as context.
  for (auto& [name, prof] :
       std::vector<std::pair<std::string, CoefficientProfile>>{
           {"free", free_p}, {"small", small_p}}) {
    for (double r : {0.05, 0.1, 0.2}) {
      const cxd z = r * std::polar(1.0, M_PI / 4.0);
      auto grid = choose_mourre_grid(3, r);
      double best = -1e300;
      bool any = false;
      for (double eta : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
        auto audit = mourre_positivity(prof, grid, z, eta, 0.05,
                                       CommutatorRoute::ExplicitMatrix);
        if (!audit.window_empty) {
          any = true;
          best = std::max(best, audit.margin_over_z2);
        }
      }
      check(any && best >= -0.05,
            "%s profile r=%.2f: margin/|z|^2 %.3f >= -0.05 (pi/4 ray)",
            name.c_str(), r, any ? best : 0.0);
    }
  }
  {
    // context: identity-route margins at pi/4 and in the valid regime pi/12
    for (double ang : {M_PI / 4.0, M_PI / 12.0}) {
      const double r = 0.2;
      auto audit =
          mourre_positivity(small_p, choose_mourre_grid(3, r),
                            r * std::polar(1.0, ang), 1.0 / 32.0, 0.05,
                            CommutatorRoute::IdentityRhs);
      info("identity-route margin at arg=%.3f: %.3f |z|^2 (%s)", ang,
           audit.margin_over_z2,
           audit.margin_over_z2 >= -0.05 ? "positive regime" : "outside regime");
    }
  }

  // hypothesis report items (H2), (H3a), (H4)
  {
    HypothesisOptions opts;
    opts.n_grid = 2048;
    opts.grid_r_max = 120.0;
    auto rep = hypothesis_report(small_p, 0.1 * std::polar(1.0, M_PI / 12.0),
                                 opts);
    auto status = [&](const std::string& name) {
      for (const auto& it : rep.items)
        if (it.name == name) return it.status;
      return std::string("MISSING");
    };
    check(status("H2-propagator") == "PASS" && status("H2-group-law") == "PASS",
          "(H2) dilation propagator bounded on H^1_z%s", "");
    check(status("H3a-Q-bound") == "PASS", "(H3a) |Q_z| bound%s", "");
    check(status("H4-Qperp-nonneg") == "PASS", "(H4) Q_perp^+ >= 0 pointwise%s",
          "");
    info("(H5) identity-route status at pi/12: %s",
         status("H5-positivity-identity").c_str());
  }
  info("elapsed %.1f s (budget 600 s)", tm.elapsed());
}

// --------------------------------------------------------------------------
// criterion 9: synthesis cross-check
// --------------------------------------------------------------------------
void criterion_9() {
  Timer tm;
  std::printf("[9] Fourier synthesis cross-check\n");
  auto prof = damped_profile(3);
  auto grid = SectorGrid::make(3, 0, 40.0, 4096);
  std::vector<double> f(grid.n), h(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.r[j];
    f[j] = x < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
    h[j] = 0.5 * f[j];
  }
  SynthesisOptions opts;
  opts.tau_max = 40.0;
  opts.dtau = 0.005;
  opts.dt_evolve = 1e-3;
  const std::vector<double> ts{2.0, 5.0, 10.0};
  std::vector<SynthesisResult> results;
  for (double mu : {0.25, 0.5}) {
    auto r = fourier_synthesis_crosscheck(prof, grid, f, h, mu, ts, opts);
    check(r.converged, "mu=%.2f: tau-range doubling change %.4f < 0.02", mu,
          r.range_doubling_change);
    for (std::size_t i = 0; i < ts.size(); ++i)
      check(r.deviation[i] <= 0.02, "mu=%.2f t=%.0f: deviation %.4f <= 0.02",
            mu, ts[i], r.deviation[i]);
    results.push_back(std::move(r));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    worst = std::max(worst, relnorm(grid, to_cx(results[0].u_synth[i]),
                                    to_cx(results[1].u_synth[i])));
  check(worst <= 0.02, "mu-independence: max deviation %.4f <= 0.02", worst);
  info("elapsed %.1f s (budget 600 s)", tm.elapsed());
}

} // namespace

int main() {
  Timer total;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("acceptance: %d/%d checks passed, %.1f s total\n",
              g_checks - g_failures, g_checks, total.elapsed());
  return g_failures == 0 ? 0 : 1;
}
