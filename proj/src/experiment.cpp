#include "dwlab/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <random>
#include <fstream>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "dwlab/free_wave.hpp"
#include "dwlab/mourre.hpp"
#include "dwlab/time_evolution.hpp"

namespace dwlab {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// suite schemas
// ---------------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "coeffs",        "resolvent-scan", "weight-scan", "theta-scan",
      "identity-tests", "decay-run",      "profile-compare", "huygens",
      "mourre",        "synthesis-check"};
  return names;
}

const std::vector<ParamSpec>& suite_schema(const std::string& suite) {
  static const std::map<std::string, std::vector<ParamSpec>> schemas = [] {
    std::map<std::string, std::vector<ParamSpec>> m;
    m["coeffs"] = {
        {"seminorm_margin", TomlItem::of(0.5), "extra kappa for the sharpness witness"},
    };
    m["resolvent-scan"] = {
        {"family", TomlItem::of(std::string("difference")), "difference | single | free"},
        {"n_list", TomlItem::of(std::vector<double>{0, 1, 2, 3}), "derivative orders"},
        {"angle", TomlItem::of(M_PI / 2.0), "ray angle in (0, pi)"},
        {"r_lo", TomlItem::of(1e-3), "smallest |z|"},
        {"r_hi", TomlItem::of(0.3), "largest |z|"},
        {"count", TomlItem::of(12ll), "geometric samples"},
        {"delta", TomlItem::of(-1.0), "weight; < 0 means m-budget + 0.6"},
        {"rho1", TomlItem::of(0.5), "rate parameter in (0, rho0)"},
        {"domain", TomlItem::of(std::string("scaled")), "fixed | scaled"},
        {"cap_strength", TomlItem::of(0.0), "absorbing layer amplitude"},
        {"slope_tol", TomlItem::of(0.15), "slope tolerance"},
    };
    m["weight-scan"] = {
        {"s_list", TomlItem::of(std::vector<double>{0.5, 1.0}), "Sobolev orders"},
        {"delta_offset", TomlItem::of(0.5), "delta = s + offset"},
        {"r_lo", TomlItem::of(1e-3), ""},
        {"r_hi", TomlItem::of(0.3), ""},
        {"count", TomlItem::of(12ll), ""},
    };
    m["theta-scan"] = {
        {"sigma_list", TomlItem::of(std::vector<double>{0, 1, 2}), ""},
        {"rho", TomlItem::of(0.5), "rho < rho0"},
        {"s", TomlItem::of(-1.0), "source order; < 0 picks the default"},
        {"angle", TomlItem::of(M_PI / 2.0), ""},
        {"r_lo", TomlItem::of(1e-3), ""},
        {"r_hi", TomlItem::of(0.3), ""},
        {"count", TomlItem::of(12ll), ""},
        {"slope_tol", TomlItem::of(0.15), ""},
    };
    m["identity-tests"] = {
        {"z_re", TomlItem::of(0.21), ""},
        {"z_im", TomlItem::of(0.3), ""},
        {"k_max", TomlItem::of(2ll), "expansion chain length cap"},
        {"n_expand", TomlItem::of(3ll), "expansion depth cap"},
        {"adjoint_n", TomlItem::of(256ll), "grid for the entrywise adjoint law"},
        {"tol", TomlItem::of(1e-8), ""},
    };
    m["decay-run"] = {
        {"support", TomlItem::of(1.0), "data support radius"},
        {"f_amp", TomlItem::of(1.0), ""},
        {"g_amp", TomlItem::of(0.5), ""},
        {"dt", TomlItem::of(1e-3), ""},
        {"t_max", TomlItem::of(40.0), ""},
        {"samples", TomlItem::of(24ll), ""},
        {"delta", TomlItem::of(-1.0), "< 0 means d + 3"},
        {"R_ball", TomlItem::of(2.0), ""},
        {"eps_envelope", TomlItem::of(0.02), "quasi-contraction epsilon"},
    };
    m["profile-compare"] = {
        {"support", TomlItem::of(1.0), ""},
        {"f_amp", TomlItem::of(1.0), ""},
        {"g_amp", TomlItem::of(0.5), ""},
        {"dt", TomlItem::of(1e-3), ""},
        {"t_lo", TomlItem::of(-1.0), ""},
        {"t_hi", TomlItem::of(-1.0), ""},
        {"samples", TomlItem::of(28ll), ""},
        {"delta", TomlItem::of(-1.0), ""},
        {"R_ball", TomlItem::of(2.0), ""},
        {"rho1", TomlItem::of(0.5), ""},
        {"slope_tol", TomlItem::of(0.3), ""},
        {"check_refinement", TomlItem::of(false), "rerun with dt/2"},
    };
    m["huygens"] = {
        {"R", TomlItem::of(1.0), ""},
        {"t", TomlItem::of(3.0), ""},
        {"residual_tol", TomlItem::of(1e-3), ""},
        {"refine_factor", TomlItem::of(3.0), "required drop when n doubles"},
    };
    m["mourre"] = {
        {"r_list", TomlItem::of(std::vector<double>{0.05, 0.1, 0.2}), ""},
        {"angle", TomlItem::of(M_PI / 4.0), ""},
        {"eta_list", TomlItem::of(std::vector<double>{1.0 / 32, 1.0 / 64, 1.0 / 128}), ""},
        {"margin_tol", TomlItem::of(0.05), ""},
        {"residual_n", TomlItem::of(2048ll), "base grid for the refinement study"},
        {"residual_r_max", TomlItem::of(60.0), ""},
        {"k_rho", TomlItem::of(0.5), ""},
    };
    m["synthesis-check"] = {
        {"mu_list", TomlItem::of(std::vector<double>{0.25, 0.5}), ""},
        {"t_list", TomlItem::of(std::vector<double>{2.0, 5.0, 10.0}), ""},
        {"support", TomlItem::of(1.0), ""},
        {"f_amp", TomlItem::of(1.0), ""},
        {"g_amp", TomlItem::of(0.5), ""},
        {"tau_max", TomlItem::of(40.0), ""},
        {"dtau", TomlItem::of(0.005), ""},
        {"dt", TomlItem::of(1e-3), ""},
        {"tol", TomlItem::of(0.02), ""},
    };
    return m;
  }();
  auto it = schemas.find(suite);
  if (it == schemas.end()) throw ConfigError("unknown suite '" + suite + "'");
  return it->second;
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min(jobs, count);
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

std::vector<double> compact_bump(const SectorGrid& grid, double R0, double amp) {
  std::vector<double> v(grid.n, 0.0);
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.r[j] / R0;
    if (x < 1.0) v[j] = amp * std::exp(1.0 - 1.0 / (1.0 - x * x));
  }
  return v;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

std::string scan_csv(const std::string& id, const ScalingReport& rep) {
  std::string csv =
      "experiment_id,r,ell_argmax,norm,predicted_exponent,fitted_slope,verdict\n";
  for (const auto& s : rep.samples) {
    csv += id + "," + fmt(s.r) + "," + std::to_string(s.argmax_ell) + "," +
           (s.ok ? fmt(s.value) : "nan") + "," + fmt(rep.predicted) + "," +
           fmt(rep.fit.slope) + "," + verdict_name(rep.verdict) + "\n";
  }
  return csv;
}

std::string scan_plot(const std::string& csv_name, const std::string& title) {
  std::string gp;
  gp += "set datafile separator ','\n";
  gp += "set logscale xy\n";
  gp += "set xlabel 'r'\nset ylabel 'norm'\n";
  gp += "set title '" + title + "'\n";
  gp += "plot '" + csv_name + "' every ::1 using 2:4 with linespoints title 'measured'\n";
  return gp;
}

json item_json(const SuiteItem& it) {
  return json{{"name", it.name},
              {"predicted", it.predicted},
              {"measured", it.measured},
              {"verdict", verdict_name(it.verdict)},
              {"note", it.note}};
}

SuiteItem make_item(const std::string& name, double predicted, double measured,
                    Verdict v, const std::string& note = "") {
  return SuiteItem{name, predicted, measured, v, note};
}

Verdict pass_if(bool ok) { return ok ? Verdict::CONSISTENT : Verdict::VIOLATION; }

// ---------------------------------------------------------------------------
// individual suites
// ---------------------------------------------------------------------------

void run_coeffs(const ExperimentConfig& cfg, const CoefficientProfile& prof,
                SuiteResult& res, const fs::path& dir) {
  const double margin = cfg.param_num("seminorm_margin");
  const int order = default_seminorm_order(prof.d());
  auto check = [&](const std::string& name, const RadialFunction& fn,
                   double kappa) {
    try {
      auto est = seminorm(fn, kappa, order);
      res.items.push_back(make_item("seminorm " + name, 0.0, est.value,
                                    Verdict::CONSISTENT,
                                    "finite, argmax r=" + fmt(est.argmax_r)));
    } catch (const SeminormError& e) {
      res.items.push_back(
          make_item("seminorm " + name, 0.0, 0.0, Verdict::VIOLATION, e.what()));
    }
  };
  check("g-1 kappa=rho0", prof.g_minus_1(), prof.rho0());
  check("w-1 kappa=rho0", prof.w_minus_1(), prof.rho0());
  check("a kappa=1+rho0", prof.absorption(), 1.0 + prof.rho0());

  // sharpness witness: the pure power absorption is not in S^{-1-rho0-margin}
  if (prof.config().a_amp > 0.0 && prof.config().bumps.empty()) {
    bool diverged = false;
    try {
      seminorm(prof.absorption(), 1.0 + prof.rho0() + margin, order);
    } catch (const SeminormError&) {
      diverged = true;
    }
    res.items.push_back(make_item("a sharpness witness", 1.0, diverged ? 1.0 : 0.0,
                                  pass_if(diverged),
                                  "seminorm(a, 1+rho0+" + fmt(margin) +
                                      ") must diverge"));
  }
  // even extension at the origin
  const double h = 1e-4;
  const double dg0 = (prof.g(h) - prof.g(-h)) / (2 * h);
  const double dw0 = (prof.w(h) - prof.w(-h)) / (2 * h);
  const double da0 = (prof.a(h) - prof.a(-h)) / (2 * h);
  const double worst = std::max({std::abs(dg0), std::abs(dw0), std::abs(da0)});
  res.items.push_back(make_item("even at origin", 0.0, worst,
                                pass_if(worst < 1e-8),
                                "centered differences of g, w, a at r=0"));
  res.items.push_back(make_item("ellipticity C_G", 0.0, prof.c_g(),
                                Verdict::CONSISTENT, "measured constant"));
  res.items.push_back(make_item("ellipticity C_w", 0.0, prof.c_w(),
                                Verdict::CONSISTENT, "measured constant"));

  std::string csv = "r,g,w,a\n";
  for (int j = 0; j <= 400; ++j) {
    const double r = cfg.grid.r_max * j / 400.0;
    csv += fmt(r) + "," + fmt(prof.g(r)) + "," + fmt(prof.w(r)) + "," +
           fmt(prof.a(r)) + "\n";
  }
  write_file(dir / "profile.csv", csv);
  res.artifacts.push_back("profile.csv");
}

void run_identity_tests(const ExperimentConfig& cfg,
                        const CoefficientProfile& prof, SuiteResult& res,
                        const fs::path& dir) {
  (void)dir;
  const cxd z{cfg.param_num("z_re"), cfg.param_num("z_im")};
  const double tol = cfg.param_num("tol");
  auto grid = SectorGrid::make(prof.d(), 0, cfg.grid.r_max, cfg.grid.n);
  ResolventContext ctx(prof, grid);

  std::mt19937_64 rng(cfg.run.seed);
  std::normal_distribution<double> dist;
  std::vector<cxd> x(grid.n);
  for (auto& v : x) v = cxd{dist(rng), dist(rng)};
  const double nx = norm(grid, x);

  // P(z) R(z) = Id
  {
    auto rx = ctx.solve(z, x);
    auto pz = ctx.assemble_pz(z);
    std::vector<cxd> back(grid.n);
    pz.mat.matvec(rx.data(), back.data());
    for (int j = 0; j < grid.n; ++j) back[j] -= x[j];
    res.items.push_back(make_item("P(z)R(z)=I", tol, norm(grid, back) / nx,
                                  pass_if(norm(grid, back) / nx <= tol)));
  }
  // R - R0 = R theta2 R0
  {
    auto rx = ctx.solve(z, x);
    auto r0x = ctx.solve(z, x, true);
    std::vector<cxd> th(grid.n);
    ctx.apply_theta(2, z, r0x, th);
    auto rhs = ctx.solve(z, th);
    std::vector<cxd> resid(grid.n);
    for (int j = 0; j < grid.n; ++j) resid[j] = rx[j] - r0x[j] - rhs[j];
    const double rel = norm(grid, resid) / norm(grid, rx);
    res.items.push_back(
        make_item("R-R0=R theta R0", tol, rel, pass_if(rel <= tol)));
  }
  // R(z) - R(ir) = R(ir) gamma2(z) R(z)
  {
    const cxd ir{0.0, std::abs(z)};
    auto rz = ctx.solve(z, x);
    auto rir = ctx.solve(ir, x);
    auto g2 = ctx.gamma_diag(2, z, false);
    std::vector<cxd> t(grid.n);
    kern::cdiag_mul(g2.data(), rz.data(), t.data(), grid.n);
    auto rhs = ctx.solve(ir, t);
    std::vector<cxd> resid(grid.n);
    for (int j = 0; j < grid.n; ++j) resid[j] = rz[j] - rir[j] - rhs[j];
    const double rel = norm(grid, resid) / norm(grid, rz);
    res.items.push_back(
        make_item("R(z)-R(ir)=R(ir)g2 R(z)", tol, rel, pass_if(rel <= tol)));
  }
  // Appendix-style expansions
  {
    const int kmax = static_cast<int>(cfg.param_int("k_max"));
    const int nmax = static_cast<int>(cfg.param_int("n_expand"));
    double worst = 0.0;
    for (int k = 0; k <= kmax; ++k) {
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
        for (int N = 0; N <= nmax; ++N) {
          auto terms = expand_ir(p, N);
          std::vector<cxd> sum(grid.n, cxd{0, 0});
          for (const auto& t : terms) {
            auto v = ctx.apply_product(t, z, x);
            for (int j = 0; j < grid.n; ++j) sum[j] += v[j];
          }
          std::vector<cxd> resid(grid.n);
          for (int j = 0; j < grid.n; ++j) resid[j] = sum[j] - orig[j];
          worst = std::max(worst, norm(grid, resid) / norm(grid, orig));
        }
      }
    }
    res.items.push_back(
        make_item("expand-ir sums (k<=" + std::to_string(kmax) + ",N<=" +
                      std::to_string(nmax) + ")",
                  tol, worst, pass_if(worst <= tol)));
  }
  // adjoint law entrywise on a small grid
  {
    const int na = static_cast<int>(cfg.param_int("adjoint_n"));
    auto sg = SectorGrid::make(prof.d(), 0, 30.0, na);
    ResolventContext sctx(prof, sg);
    std::vector<std::vector<cxd>> rz(na), rzc(na);
    std::vector<cxd> e(na, cxd{0, 0});
    for (int j = 0; j < na; ++j) {
      e[j] = 1.0;
      rz[j] = sctx.solve(z, e);
      rzc[j] = sctx.solve(-std::conj(z), e);
      e[j] = 0.0;
    }
    // R(z)^dag = Q^{-1} R(z)^H Q must equal R(-conj z)
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j) {
        const cxd adj = std::conj(rz[i][j]) * (sg.q[j] / sg.q[i]);
        worst = std::max(worst, std::abs(adj - rzc[j][i]));
        scale = std::max(scale, std::abs(rz[i][j]));
      }
    const double rel = worst / scale;
    res.items.push_back(make_item("adjoint law R(z)*=R(-conj z)", 1e-12, rel,
                                  pass_if(rel <= 1e-12), "entrywise"));
  }
  // coercivity witness on D_I
  {
    const cxd zi = std::abs(z) * cxd{std::cos(M_PI / 3), std::sin(M_PI / 3)};
    double worst = 1e300;
    for (int t = 0; t < 6; ++t) {
      std::vector<cxd> u(grid.n);
      for (auto& v : u) v = cxd{dist(rng), dist(rng)};
      worst = std::min(worst, ctx.coercivity_ratio(zi, u));
    }
    res.items.push_back(make_item("coercivity on D_I", 0.0, worst,
                                  pass_if(worst > 0.0),
                                  "Re<e^{-i theta} P u, u> / |z|^2 |u|_{H1z}^2"));
  }
}

void run_resolvent_scan(const ExperimentConfig& cfg,
                        const CoefficientProfile& prof, SuiteResult& res,
                        const fs::path& dir, bool plots, int jobs) {
  ScanConfig sc;
  sc.n_grid = cfg.grid.n;
  sc.grid_r_max = cfg.grid.r_max;
  sc.ell_max = cfg.grid.ell_max;
  sc.ray.angle = cfg.param_num("angle");
  sc.ray.r_lo = cfg.param_num("r_lo");
  sc.ray.r_hi = cfg.param_num("r_hi");
  sc.ray.count = static_cast<int>(cfg.param_int("count"));
  sc.rho1 = cfg.param_num("rho1");
  sc.slope_tol = cfg.param_num("slope_tol");
  sc.domain = cfg.param_str("domain") == "scaled" ? DomainPolicy::Scaled
                                                  : DomainPolicy::Fixed;
  sc.cap.strength = cfg.param_num("cap_strength");
  sc.power.seed = cfg.run.seed;
  const std::string family = cfg.param_str("family");
  auto n_list = cfg.param_list("n_list");

  std::vector<ScalingReport> reports(n_list.size());
  parallel_for(static_cast<int>(n_list.size()), jobs, [&](int i) {
    const int n = static_cast<int>(n_list[i]);
    const double delta_cfg = cfg.param_num("delta");
    double predicted;
    NormTarget target;
    std::string name;
    if (family == "difference") {
      target = DiffTarget{n};
      predicted = predicted_exponent_diff(prof.d(), sc.rho1, n);
      name = "diff n=" + std::to_string(n);
    } else if (family == "free") {
      target = DerivTarget{n, true};
      predicted = predicted_exponent_single(prof.d(), n);
      name = "free n=" + std::to_string(n);
    } else {
      target = DerivTarget{n, false};
      predicted = predicted_exponent_single(prof.d(), n);
      name = "single n=" + std::to_string(n);
    }
    const double delta = delta_cfg > 0.0 ? delta_cfg : n + 2.6;
    reports[i] = scan_resolvent(prof, sc, target, delta, delta, predicted, name);
  });

  const std::string id = cfg.experiment_id();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    res.items.push_back(make_item(rep.name, rep.predicted, rep.fit.slope,
                                  rep.verdict,
                                  "ratio=" + fmt(rep.ratio_max_min)));
    const std::string csv_name =
        "scan_" + family + "_n" + std::to_string(static_cast<int>(n_list[i])) +
        ".csv";
    write_file(dir / csv_name, scan_csv(id, rep));
    res.artifacts.push_back(csv_name);
    if (plots) {
      const std::string gp = "plot_" + csv_name + ".gp";
      write_file(dir / gp, scan_plot(csv_name, rep.name));
      res.artifacts.push_back(gp);
    }
  }
}

void run_weight_scan(const ExperimentConfig& cfg, const CoefficientProfile& prof,
                     SuiteResult& res, const fs::path& dir, bool plots, int jobs) {
  ScanConfig sc;
  sc.n_grid = cfg.grid.n;
  sc.grid_r_max = cfg.grid.r_max;
  sc.ell_max = cfg.grid.ell_max;
  sc.ray.r_lo = cfg.param_num("r_lo");
  sc.ray.r_hi = cfg.param_num("r_hi");
  sc.ray.count = static_cast<int>(cfg.param_int("count"));
  sc.power.seed = cfg.run.seed;
  auto s_list = cfg.param_list("s_list");
  const double off = cfg.param_num("delta_offset");

  std::vector<ScalingReport> reports(s_list.size());
  parallel_for(static_cast<int>(s_list.size()), jobs, [&](int i) {
    reports[i] = scan_weight(prof, sc, s_list[i], s_list[i] + off);
  });
  const std::string id = cfg.experiment_id();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    res.items.push_back(
        make_item(rep.name, rep.predicted, rep.fit.slope, rep.verdict, rep.note));
    const std::string csv_name = "weight_s" + fmt(s_list[i]) + ".csv";
    write_file(dir / csv_name, scan_csv(id, rep));
    res.artifacts.push_back(csv_name);
    if (plots) {
      const std::string gp = "plot_" + csv_name + ".gp";
      write_file(dir / gp, scan_plot(csv_name, rep.name));
      res.artifacts.push_back(gp);
    }
  }
}

void run_theta_scan(const ExperimentConfig& cfg, const CoefficientProfile& prof,
                    SuiteResult& res, const fs::path& dir, bool plots, int jobs) {
  ScanConfig sc;
  sc.n_grid = cfg.grid.n;
  sc.grid_r_max = cfg.grid.r_max;
  sc.ell_max = cfg.grid.ell_max;
  sc.ray.angle = cfg.param_num("angle");
  sc.ray.r_lo = cfg.param_num("r_lo");
  sc.ray.r_hi = cfg.param_num("r_hi");
  sc.ray.count = static_cast<int>(cfg.param_int("count"));
  sc.slope_tol = cfg.param_num("slope_tol");
  sc.power.seed = cfg.run.seed;
  auto sigma_list = cfg.param_list("sigma_list");
  const double rho = cfg.param_num("rho");
  const double s = cfg.param_num("s");

  std::vector<ScalingReport> reports(sigma_list.size());
  parallel_for(static_cast<int>(sigma_list.size()), jobs, [&](int i) {
    reports[i] = scan_theta(prof, sc, static_cast<int>(sigma_list[i]), rho, s);
  });
  const std::string id = cfg.experiment_id();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    res.items.push_back(
        make_item(rep.name, rep.predicted, rep.fit.slope, rep.verdict, rep.note));
    const std::string csv_name =
        "theta_sigma" + std::to_string(static_cast<int>(sigma_list[i])) + ".csv";
    write_file(dir / csv_name, scan_csv(id, rep));
    res.artifacts.push_back(csv_name);
    if (plots) {
      const std::string gp = "plot_" + csv_name + ".gp";
      write_file(dir / gp, scan_plot(csv_name, rep.name));
      res.artifacts.push_back(gp);
    }
  }
}

void run_decay(const ExperimentConfig& cfg, const CoefficientProfile& prof,
               SuiteResult& res, const fs::path& dir) {
  auto grid = SectorGrid::make(prof.d(), 0, cfg.grid.r_max, cfg.grid.n);
  const double R0 = cfg.param_num("support");
  auto f = compact_bump(grid, R0, cfg.param_num("f_amp"));
  auto g = compact_bump(grid, R0, cfg.param_num("g_amp"));
  const double dt = cfg.param_num("dt");
  const double tmax = cfg.param_num("t_max");
  const int nsamp = static_cast<int>(cfg.param_int("samples"));
  const double delta =
      cfg.param_num("delta") > 0 ? cfg.param_num("delta") : prof.d() + 3.0;
  const double Rb = cfg.param_num("R_ball");
  const double eps = cfg.param_num("eps_envelope");

  std::vector<double> ts;
  for (int i = 1; i <= nsamp; ++i) ts.push_back(tmax * i / nsamp);
  WaveEvolver ev(prof, grid, dt);
  auto states = ev.run(f, g, ts);

  const double nu = 2.0 * eps * std::sqrt(prof.w_min());
  WaveState init;
  init.t = 0;
  init.u = f;
  init.v.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) init.v[j] = prof.w(grid.r[j]) * g[j];
  const double e0 = ev.modified_energy(init, nu);

  std::string csv = "experiment_id,t,norm_local,norm_weighted,norm_diff\n";
  const std::string id = cfg.experiment_id();
  double worst_env = 0.0;
  std::vector<double> t_axis, local_axis;
  for (const auto& st : states) {
    const double el = ev.modified_energy(st, nu);
    worst_env = std::max(worst_env, el / (e0 * std::exp(2.0 * eps * st.t)));
    double wloc = 0.0, wwei = 0.0;
    for (int j = 0; j < grid.n; ++j) {
      const double w2 = st.u[j] * st.u[j];
      if (grid.r[j] <= Rb) wloc += grid.q[j] * w2;
      wwei += grid.q[j] * std::pow(1 + grid.r[j] * grid.r[j], -delta) * w2;
    }
    t_axis.push_back(st.t);
    local_axis.push_back(std::sqrt(wloc));
    csv += id + "," + fmt(st.t) + "," + fmt(std::sqrt(wloc)) + "," +
           fmt(std::sqrt(wwei)) + ",nan\n";
  }
  write_file(dir / "decay.csv", csv);
  res.artifacts.push_back("decay.csv");

  res.items.push_back(make_item("modified-energy envelope", 1.0, worst_env,
                                pass_if(worst_env <= 1.0 + 1e-9),
                                "max E(t)/(E(0) e^{2 eps t})"));
  // finite speed: mass beyond the light cone + margin
  const auto& last = states.back();
  const double rout = R0 + ev.gamma() * last.t + 1.0;
  double outside = 0.0, total = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const double m = grid.q[j] * last.u[j] * last.u[j];
    total += m;
    if (grid.r[j] > rout) outside += m;
  }
  const double frac = total > 0 ? std::sqrt(outside / total) : 0.0;
  res.items.push_back(make_item("finite speed", 1e-8, frac, pass_if(frac <= 1e-8),
                                "relative mass outside B(R0+gamma t+1)"));
  auto fitloc = fit_loglog_window(t_axis, local_axis, 8.0 * R0, tmax);
  const double pred = 1.0 - prof.d();
  res.items.push_back(make_item("local decay slope", pred, fitloc.slope,
                                fitloc.npts >= 2 && fitloc.slope <= pred + 0.3
                                    ? Verdict::CONSISTENT
                                    : Verdict::INCONCLUSIVE,
                                "informational at desk scale"));
}

void run_profile_compare(const ExperimentConfig& cfg,
                         const CoefficientProfile& prof, SuiteResult& res,
                         const fs::path& dir) {
  auto grid = SectorGrid::make(prof.d(), 0, cfg.grid.r_max, cfg.grid.n);
  const double R0 = cfg.param_num("support");
  auto f = compact_bump(grid, R0, cfg.param_num("f_amp"));
  auto g = compact_bump(grid, R0, cfg.param_num("g_amp"));
  ProfileCompareOptions opts;
  opts.delta = cfg.param_num("delta");
  opts.rho1 = cfg.param_num("rho1");
  opts.R_ball = cfg.param_num("R_ball");
  opts.dt = cfg.param_num("dt");
  opts.t_lo = cfg.param_num("t_lo");
  opts.t_hi = cfg.param_num("t_hi");
  opts.slope_tol = cfg.param_num("slope_tol");
  const int nsamp = static_cast<int>(cfg.param_int("samples"));
  if (opts.t_lo > 0 && opts.t_hi > opts.t_lo)
    opts.t_samples = geometric_samples(0.5 * opts.t_lo, opts.t_hi, nsamp);

  auto rep = profile_comparison(prof, grid, f, g, opts);

  std::string csv = "experiment_id,t,norm_local,norm_weighted,norm_diff\n";
  const std::string id = cfg.experiment_id();
  for (std::size_t i = 0; i < rep.series.t.size(); ++i)
    csv += id + "," + fmt(rep.series.t[i]) + "," + fmt(rep.series.norm_local[i]) +
           "," + fmt(rep.series.norm_weighted[i]) + "," +
           fmt(rep.series.norm_diff[i]) + "\n";
  write_file(dir / "profile_compare.csv", csv);
  res.artifacts.push_back("profile_compare.csv");

  res.items.push_back(make_item("local decay slope", rep.pred_local,
                                rep.fit_local.slope, rep.verdict_local,
                                "window [" + fmt(rep.fit_lo) + "," +
                                    fmt(rep.fit_hi) + "]"));
  res.items.push_back(make_item(
      "diff/free ratio slope", rep.pred_ratio, rep.fit_ratio.slope,
      rep.verdict_ratio, rep.ratio_monotone ? "monotone" : "NOT monotone"));

  if (cfg.param_bool("check_refinement")) {
    ProfileCompareOptions o2 = opts;
    o2.dt = opts.dt / 2.0;
    auto rep2 = profile_comparison(prof, grid, f, g, o2);
    const double dslope =
        std::abs(rep2.fit_local.slope - rep.fit_local.slope);
    res.items.push_back(make_item("stepping refinement", 0.05, dslope,
                                  pass_if(dslope < 0.05),
                                  "slope change under dt/2"));
  }
}

void run_huygens(const ExperimentConfig& cfg, const CoefficientProfile& prof,
                 SuiteResult& res, const fs::path& dir) {
  (void)dir;
  if (prof.d() % 2 == 0) {
    res.items.push_back(make_item("huygens precondition", 0, 0,
                                  Verdict::INCONCLUSIVE,
                                  "d even: strong Huygens does not apply"));
    return;
  }
  const double R = cfg.param_num("R");
  const double t = cfg.param_num("t");
  const double tol = cfg.param_num("residual_tol");
  const double factor = cfg.param_num("refine_factor");
  auto grid = SectorGrid::make(prof.d(), 0, cfg.grid.r_max, cfg.grid.n);
  auto f0 = compact_bump(grid, R, 1.0);
  auto g0 = compact_bump(grid, R, 0.5);
  const double resid = huygens_residual(grid, f0, g0, R, t);
  res.items.push_back(make_item("huygens residual", tol, resid,
                                pass_if(resid <= tol),
                                "n=" + std::to_string(cfg.grid.n)));
  auto gridc = SectorGrid::make(prof.d(), 0, cfg.grid.r_max, cfg.grid.n / 2);
  auto f0c = compact_bump(gridc, R, 1.0);
  auto g0c = compact_bump(gridc, R, 0.5);
  const double residc = huygens_residual(gridc, f0c, g0c, R, t);
  res.items.push_back(make_item("huygens refinement", factor,
                                resid > 0 ? residc / resid : 0.0,
                                pass_if(residc >= factor * resid),
                                "coarse/fine residual ratio"));
}

void run_mourre(const ExperimentConfig& cfg, const CoefficientProfile& prof,
                SuiteResult& res, const fs::path& dir) {
  const auto r_list = cfg.param_list("r_list");
  const auto eta_list = cfg.param_list("eta_list");
  const double angle = cfg.param_num("angle");
  const double mtol = cfg.param_num("margin_tol");
  const double krho = cfg.param_num("k_rho");
  const cxd dir_z{std::cos(angle), std::sin(angle)};

  // commutator identity refinement
  {
    const int n0 = static_cast<int>(cfg.param_int("residual_n"));
    const double rmax = cfg.param_num("residual_r_max");
    const cxd z = 0.1 * cxd{std::cos(M_PI / 4), std::sin(M_PI / 4)};
    auto g1 = SectorGrid::make(prof.d(), 0, rmax, n0);
    auto g2 = SectorGrid::make(prof.d(), 0, rmax, 2 * n0);
    const double r1 = commutator_identity_residual(prof, g1, z);
    const double r2 = commutator_identity_residual(prof, g2, z);
    const double slope = std::log2(r1 / r2);
    res.items.push_back(make_item("commutator residual slope", 1.0, slope,
                                  pass_if(slope >= 1.0),
                                  "residuals " + fmt(r1) + " -> " + fmt(r2)));
  }
  // K-bound stability across r
  {
    std::vector<double> kb;
    for (double r : {0.01, 0.1}) {
      auto grid = SectorGrid::make(prof.d(), 0, cfg.grid.r_max,
                                   std::min(cfg.grid.n, 2048));
      kb.push_back(k_operator_bound(prof, grid, r * dir_z, krho));
    }
    const double ratio = kb[0] > 0 ? std::max(kb[0], kb[1]) / std::min(kb[0], kb[1])
                                   : 0.0;
    res.items.push_back(make_item("K-bound stability", 3.0, ratio,
                                  pass_if(ratio <= 3.0 || kb[0] == 0.0),
                                  "|K <zx>^rho|/|z|^2 at r=0.01 vs 0.1"));
  }
  // positivity margins along the ray, best over the eta scan, both routes
  std::string csv = "experiment_id,r,eta,route,margin_over_z2,window,verdict\n";
  const std::string id = cfg.experiment_id();
  for (double r : r_list) {
    const cxd z = r * dir_z;
    for (auto route :
         {CommutatorRoute::ExplicitMatrix, CommutatorRoute::IdentityRhs}) {
      const char* rname =
          route == CommutatorRoute::ExplicitMatrix ? "explicit" : "identity";
      double best = -1e300;
      bool any = false;
      for (double eta : eta_list) {
        auto grid = choose_mourre_grid(prof.d(), r);
        auto audit = mourre_positivity(prof, grid, z, eta, mtol, route);
        csv += id + "," + fmt(r) + "," + fmt(eta) + "," + rname + "," +
               (audit.window_empty ? "nan" : fmt(audit.margin_over_z2)) + "," +
               std::to_string(audit.window_size) + "," +
               verdict_name(audit.verdict) + "\n";
        if (!audit.window_empty) {
          any = true;
          best = std::max(best, audit.margin_over_z2);
        }
      }
      res.items.push_back(make_item(
          "positivity margin r=" + fmt(r) + " (" + rname + ")", -mtol,
          any ? best : 0.0,
          !any ? Verdict::INCONCLUSIVE : pass_if(best >= -mtol),
          any ? "best margin/|z|^2 over eta scan" : "empty spectral window"));
    }
  }
  write_file(dir / "mourre_margins.csv", csv);
  res.artifacts.push_back("mourre_margins.csv");

  // hypothesis audit at the mid-ray point
  {
    const double r = r_list.empty() ? 0.1 : r_list[r_list.size() / 2];
    HypothesisOptions hopts;
    hopts.margin_tol = mtol;
    hopts.n_grid = std::min(cfg.grid.n, 2048);
    hopts.grid_r_max = cfg.grid.r_max;
    hopts.eta_list.assign(eta_list.begin(), eta_list.end());
    auto hrep = hypothesis_report(prof, r * dir_z, hopts);
    json jitems = json::array();
    for (const auto& it : hrep.items) {
      jitems.push_back({{"name", it.name},
                        {"status", it.status},
                        {"measured", it.measured},
                        {"bound", it.bound},
                        {"note", it.note}});
      Verdict v = it.status == "PASS"  ? Verdict::CONSISTENT
                  : it.status == "FAIL" ? Verdict::VIOLATION
                                        : Verdict::INCONCLUSIVE;
      if (it.status == "SKIPPED") v = Verdict::CONSISTENT;
      res.items.push_back(make_item("hyp " + it.name, it.bound, it.measured, v,
                                    it.status + ": " + it.note));
    }
    write_file(dir / "hypothesis_report.json", json(jitems).dump(2) + "\n");
    res.artifacts.push_back("hypothesis_report.json");
  }
}

void run_synthesis(const ExperimentConfig& cfg, const CoefficientProfile& prof,
                   SuiteResult& res, const fs::path& dir) {
  auto grid = SectorGrid::make(prof.d(), 0, cfg.grid.r_max, cfg.grid.n);
  const double R0 = cfg.param_num("support");
  auto f = compact_bump(grid, R0, cfg.param_num("f_amp"));
  auto g = compact_bump(grid, R0, cfg.param_num("g_amp"));
  auto mu_list = cfg.param_list("mu_list");
  auto t_list = cfg.param_list("t_list");
  SynthesisOptions opts;
  opts.tau_max = cfg.param_num("tau_max");
  opts.dtau = cfg.param_num("dtau");
  opts.dt_evolve = cfg.param_num("dt");
  const double tol = cfg.param_num("tol");

  std::string csv = "experiment_id,mu,t,deviation\n";
  const std::string id = cfg.experiment_id();
  std::vector<SynthesisResult> results;
  for (double mu : mu_list) {
    auto r = fourier_synthesis_crosscheck(prof, grid, f, g, mu, t_list, opts);
    for (std::size_t i = 0; i < t_list.size(); ++i) {
      csv += id + "," + fmt(mu) + "," + fmt(t_list[i]) + "," +
             fmt(r.deviation[i]) + "\n";
      res.items.push_back(make_item(
          "synthesis mu=" + fmt(mu) + " t=" + fmt(t_list[i]), tol,
          r.deviation[i],
          !r.converged ? Verdict::INCONCLUSIVE : pass_if(r.deviation[i] <= tol),
          r.converged ? "" : "tau-range not converged"));
    }
    results.push_back(std::move(r));
  }
  // mu-independence
  if (results.size() >= 2) {
    double worst = 0.0;
    for (std::size_t i = 0; i < t_list.size(); ++i) {
      double dev = 0.0, den = 0.0;
      for (int j = 0; j < grid.n; ++j) {
        const double e = results[0].u_synth[i][j] - results[1].u_synth[i][j];
        dev += grid.q[j] * e * e;
        den += grid.q[j] * results[0].u_synth[i][j] * results[0].u_synth[i][j];
      }
      worst = std::max(worst, den > 0 ? std::sqrt(dev / den) : 0.0);
    }
    res.items.push_back(make_item("mu-independence", tol, worst,
                                  pass_if(worst <= tol),
                                  "synthesized u at first two mu values"));
  }
  write_file(dir / "synthesis.csv", csv);
  res.artifacts.push_back("synthesis.csv");
}

} // namespace

// ---------------------------------------------------------------------------
// orchestration
// ---------------------------------------------------------------------------

SuiteResult run_suite(const ExperimentConfig& cfg, const fs::path& out_dir,
                      bool plots) {
  SuiteResult res;
  res.suite = cfg.suite;
  res.experiment_id = cfg.experiment_id();
  fs::create_directories(out_dir);
  write_file(out_dir / "resolved.toml", cfg.resolved_toml());
  res.artifacts.push_back("resolved.toml");

  auto prof = CoefficientProfile::build(cfg.profile);
  const int jobs = cfg.run.jobs;
  try {
    if (cfg.suite == "coeffs") run_coeffs(cfg, prof, res, out_dir);
    else if (cfg.suite == "identity-tests") run_identity_tests(cfg, prof, res, out_dir);
    else if (cfg.suite == "resolvent-scan")
      run_resolvent_scan(cfg, prof, res, out_dir, plots, jobs);
    else if (cfg.suite == "weight-scan")
      run_weight_scan(cfg, prof, res, out_dir, plots, jobs);
    else if (cfg.suite == "theta-scan")
      run_theta_scan(cfg, prof, res, out_dir, plots, jobs);
    else if (cfg.suite == "decay-run") run_decay(cfg, prof, res, out_dir);
    else if (cfg.suite == "profile-compare")
      run_profile_compare(cfg, prof, res, out_dir);
    else if (cfg.suite == "huygens") run_huygens(cfg, prof, res, out_dir);
    else if (cfg.suite == "mourre") run_mourre(cfg, prof, res, out_dir);
    else if (cfg.suite == "synthesis-check") run_synthesis(cfg, prof, res, out_dir);
    else throw ConfigError("unknown suite '" + cfg.suite + "'");
  } catch (const std::exception& e) {
    res.had_errors = true;
    res.items.push_back(make_item("suite error", 0, 0, Verdict::INCONCLUSIVE,
                                  e.what()));
  }

  // deterministic summary (no timestamps)
  json summary;
  summary["suite"] = res.suite;
  summary["experiment_id"] = res.experiment_id;
  json jitems = json::array();
  for (const auto& it : res.items) jitems.push_back(item_json(it));
  summary["items"] = jitems;
  summary["artifacts"] = res.artifacts;
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");

  // run record with the wall-clock stamp
  RunRecord rec;
  rec.experiment_id = res.experiment_id;
  rec.suite = res.suite;
  {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    rec.timestamp = buf;
  }
  for (const auto& it : res.items) {
    if (it.verdict == Verdict::VIOLATION) ++rec.violations;
    else if (it.verdict == Verdict::INCONCLUSIVE) ++rec.inconclusive;
    else ++rec.consistent;
  }
  json jrec{{"experiment_id", rec.experiment_id},
            {"timestamp", rec.timestamp},
            {"suite", rec.suite},
            {"artifacts", res.artifacts},
            {"verdicts",
             {{"consistent", rec.consistent},
              {"violations", rec.violations},
              {"inconclusive", rec.inconclusive}}}};
  write_file(out_dir / "record.json", jrec.dump(2) + "\n");
  return res;
}

int run_command(const std::string& config_path, const std::string& out_override,
                bool plots, int jobs) {
  ExperimentConfig cfg;
  try {
    cfg = ExperimentConfig::load(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!out_override.empty()) cfg.run.out_dir = out_override;
  if (jobs > 0) cfg.run.jobs = jobs;
  if (const char* env = std::getenv("DWLAB_JOBS")) cfg.run.jobs = std::atoi(env);

  const fs::path dir =
      fs::path(cfg.run.out_dir) / (cfg.suite + "-" + cfg.experiment_id());
  SuiteResult res;
  try {
    res = run_suite(cfg, dir, plots || cfg.run.plots);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "suite " << res.suite << " (" << res.experiment_id << ") -> "
            << dir.string() << "\n";
  for (const auto& it : res.items) {
    std::printf("  %-40s predicted=%-10.4g measured=%-12.6g %s %s\n",
                it.name.c_str(), it.predicted, it.measured,
                verdict_name(it.verdict), it.note.c_str());
  }
  return res.any_violation() ? 1 : 0;
}

int report_command(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir)) {
    std::cerr << "error: no such directory: " << dir << "\n";
    return 2;
  }
  std::vector<fs::path> summaries;
  for (auto& p : fs::recursive_directory_iterator(dir))
    if (p.is_regular_file() && p.path().filename() == "summary.json")
      summaries.push_back(p.path());
  std::sort(summaries.begin(), summaries.end());
  if (summaries.empty()) {
    std::cerr << "error: no summary.json found under " << dir
              << " (expected resolved.toml, summary.json, record.json, *.csv)\n";
    return 2;
  }
  int violations = 0;
  for (const auto& sp : summaries) {
    std::ifstream in(sp);
    json j;
    in >> j;
    std::cout << "== suite " << j["suite"].get<std::string>() << " ("
              << j["experiment_id"].get<std::string>() << ") at "
              << sp.parent_path().string() << "\n";
    std::printf("  %-42s %12s %14s %s\n", "item", "predicted", "measured",
                "verdict");
    for (const auto& it : j["items"]) {
      std::printf("  %-42s %12.4g %14.6g %s  %s\n",
                  it["name"].get<std::string>().c_str(),
                  it["predicted"].get<double>(), it["measured"].get<double>(),
                  it["verdict"].get<std::string>().c_str(),
                  it["note"].get<std::string>().c_str());
      if (it["verdict"] == "VIOLATION") ++violations;
    }
    std::cout << "  artifacts:";
    for (const auto& a : j["artifacts"])
      std::cout << " " << a.get<std::string>();
    std::cout << "\n";
  }
  return violations > 0 ? 1 : 0;
}

} // namespace dwlab
