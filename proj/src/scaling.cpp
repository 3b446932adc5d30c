#include "dwlab/scaling.hpp"

#include <algorithm>
#include <cmath>

namespace dwlab {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CONSISTENT: return "CONSISTENT";
    case Verdict::VIOLATION: return "VIOLATION";
    default: return "INCONCLUSIVE";
  }
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                    int drop_largest) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > 0.0) pts.emplace_back(x[i], y[i]);
  std::sort(pts.begin(), pts.end());
  while (drop_largest-- > 0 && pts.size() > 2) pts.pop_back();

  SlopeFit fit;
  fit.npts = static_cast<int>(pts.size());
  if (fit.npts < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [px, py] : pts) {
    const double lx = std::log(px), ly = std::log(py);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = fit.npts * sxx - sx * sx;
  fit.slope = (fit.npts * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / fit.npts;
  double rss = 0.0;
  for (auto& [px, py] : pts) {
    const double e = std::log(py) - (fit.slope * std::log(px) + fit.intercept);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / fit.npts);
  return fit;
}

SlopeFit fit_loglog_window(const std::vector<double>& x,
                           const std::vector<double>& y, double x_lo,
                           double x_hi) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= x_lo && x[i] <= x_hi) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  return fit_loglog(xs, ys, 0);
}

std::vector<double> geometric_samples(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, count == 1 ? 0.0 : i / double(count - 1));
  return out;
}

double predicted_exponent_single(int d, int n) {
  return std::min(static_cast<double>(d - n - 2), 0.0);
}
double predicted_exponent_diff(int d, double rho1, int n) {
  return std::min(d + rho1 - n - 2.0, 0.0);
}

namespace {

struct GridChoice {
  int n;
  double r_max;
};

GridChoice choose_domain(const ScanConfig& cfg, double r) {
  if (cfg.domain == DomainPolicy::Fixed) return {cfg.n_grid, cfg.grid_r_max};
  const double h = cfg.grid_r_max / (cfg.n_grid + 1);
  const double rmax = std::max(cfg.grid_r_max, cfg.domain_scale / r);
  const int n = static_cast<int>(std::lround(rmax / h)) - 1;
  return {n, rmax};
}

Verdict decide(const ScalingReport& rep, double predicted, double tol,
               double residual_threshold, int ok_count, int total) {
  if (total == 0 || ok_count < std::max(2, total - total / 5)) // >20% failures
    return Verdict::INCONCLUSIVE;
  if (rep.fit.npts < 2 || rep.fit.residual > residual_threshold)
    return Verdict::INCONCLUSIVE;
  return rep.fit.slope >= predicted - tol ? Verdict::CONSISTENT
                                          : Verdict::VIOLATION;
}

} // namespace

ScalingReport scan_resolvent(const CoefficientProfile& profile,
                             const ScanConfig& cfg, const NormTarget& target,
                             double deltaL, double deltaR, double predicted,
                             const std::string& name) {
  ScalingReport rep;
  rep.name = name;
  rep.predicted = predicted;
  rep.tolerance = cfg.slope_tol;
  const auto rs = geometric_samples(cfg.ray.r_lo, cfg.ray.r_hi, cfg.ray.count);
  const cxd dir{std::cos(cfg.ray.angle), std::sin(cfg.ray.angle)};
  int ok = 0;
  for (double r : rs) {
    ScanSample s;
    s.r = r;
    try {
      const auto dom = choose_domain(cfg, r);
      auto res = weighted_norm(profile, dom.n, dom.r_max, deltaL, target,
                               deltaR, r * dir, cfg.ell_max, cfg.power, cfg.cap);
      s.value = res.value;
      s.argmax_ell = res.argmax_ell;
      s.ok = true;
      ++ok;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    rep.samples.push_back(std::move(s));
  }
  std::vector<double> xs, ys;
  for (auto& s : rep.samples)
    if (s.ok && s.value > 0.0) {
      xs.push_back(s.r);
      ys.push_back(s.value);
    }
  rep.fit = fit_loglog(xs, ys, cfg.drop_largest);
  if (!ys.empty()) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(xs[i], ys[i]);
    std::sort(pts.begin(), pts.end());
    for (int k = 0; k < cfg.drop_largest && pts.size() > 2; ++k) pts.pop_back();
    double vmin = 1e300, vmax = 0.0;
    for (auto& [x, y] : pts) {
      vmin = std::min(vmin, y);
      vmax = std::max(vmax, y);
    }
    rep.ratio_max_min = vmin > 0.0 ? vmax / vmin : 0.0;
  }
  rep.verdict = decide(rep, predicted, cfg.slope_tol, cfg.residual_threshold,
                       ok, cfg.ray.count);
  // flat exponents read as boundedness, not slope
  if (predicted == 0.0 && rep.verdict != Verdict::INCONCLUSIVE)
    rep.verdict = rep.ratio_max_min < 3.0 || rep.fit.slope >= -cfg.slope_tol
                      ? Verdict::CONSISTENT
                      : Verdict::VIOLATION;
  return rep;
}

namespace {

// T~ = <D>^{s_out} inner <D>^{-s_in}; the multipliers are measure-selfadjoint
ApplyOp sobolev_wrap(std::shared_ptr<const SectorEigen> eig, double r,
                     double s_out, const ApplyOp& inner, double s_in) {
  const double r2 = r * r;
  auto mult = [eig, r2](double s, const std::vector<cxd>& x) {
    if (s == 0.0) return x;
    std::vector<cxd> y;
    eig->apply_multiplier(
        [s, r2](double lam) {
          return std::pow(1.0 + std::max(lam, 0.0) / r2, 0.5 * s);
        },
        x, y);
    return y;
  };
  ApplyOp op;
  op.apply = [mult, inner, s_in, s_out](const std::vector<cxd>& x) {
    return mult(s_out, inner.apply(mult(-s_in, x)));
  };
  op.apply_adj = [mult, inner, s_in, s_out](const std::vector<cxd>& x) {
    return mult(-s_in, inner.apply_adj(mult(s_out, x)));
  };
  return op;
}

} // namespace

BoundednessReport scan_resolvent_h1(const CoefficientProfile& profile,
                                    const ScanConfig& cfg) {
  BoundednessReport rep;
  rep.name = "resolvent-h1";
  const auto rs = geometric_samples(cfg.ray.r_lo, cfg.ray.r_hi, cfg.ray.count);
  const cxd dir{std::cos(cfg.ray.angle), std::sin(cfg.ray.angle)};
  int ok = 0;
  for (double r : rs) {
    ScanSample s;
    s.r = r;
    try {
      double best = 0.0;
      int best_ell = 0;
      for (int ell = 0; ell <= cfg.ell_max; ++ell) {
        auto grid = SectorGrid::make(profile.d(), ell, cfg.grid_r_max, cfg.n_grid);
        auto eig = SectorEigen::get(grid);
        auto ctx = std::make_shared<ResolventContext>(profile, grid, cfg.cap);
        const cxd z = r * dir;
        const cxd zadj = -std::conj(z);
        ApplyOp inner;
        inner.apply = [ctx, z](const std::vector<cxd>& x) { return ctx->solve(z, x); };
        inner.apply_adj = [ctx, zadj](const std::vector<cxd>& x) {
          return ctx->solve(zadj, x);
        };
        // R(z): H^{-1} -> H^1
        ApplyOp op = sobolev_wrap(eig, r, 1.0, inner, -1.0);
        PowerIterOpts o = cfg.power;
        o.seed = cfg.power.seed ^ (0x9e3779b97f4a7c15ull * (ell + 1));
        auto nr = operator_norm(grid, op, o);
        if (!nr.converged) throw PowerIterError("power iteration stalled");
        if (nr.value > best) {
          best = nr.value;
          best_ell = ell;
        }
      }
      s.value = best * r * r;
      s.argmax_ell = best_ell;
      s.ok = true;
      ++ok;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    rep.samples.push_back(std::move(s));
  }
  double vmin = 1e300, vmax = 0.0;
  for (auto& s : rep.samples)
    if (s.ok) {
      vmin = std::min(vmin, s.value);
      vmax = std::max(vmax, s.value);
    }
  rep.ratio_max_min = (ok > 0 && vmin > 0.0) ? vmax / vmin : 0.0;
  rep.verdict = ok < cfg.ray.count - cfg.ray.count / 5 ? Verdict::INCONCLUSIVE
                : rep.ratio_max_min <= 10.0            ? Verdict::CONSISTENT
                                                       : Verdict::VIOLATION;
  return rep;
}

ScalingReport scan_weight(const CoefficientProfile& profile, const ScanConfig& cfg,
                          double s, double delta) {
  ScalingReport rep;
  rep.name = "weight s=" + std::to_string(s) + " delta=" + std::to_string(delta);
  rep.predicted = s;
  rep.tolerance = 0.1;
  const int d = profile.d();
  const bool hypothesis_ok = (s >= 0.0 && s < 0.5 * d && delta > s);
  const auto rs = geometric_samples(cfg.ray.r_lo, cfg.ray.r_hi, cfg.ray.count);
  int ok = 0;
  for (double r : rs) {
    ScanSample sample;
    sample.r = r;
    try {
      double best = 0.0;
      int best_ell = 0;
      for (int ell = 0; ell <= cfg.ell_max; ++ell) {
        auto grid = SectorGrid::make(d, ell, cfg.grid_r_max, cfg.n_grid);
        auto eig = SectorEigen::get(grid);
        std::vector<double> wdiag(grid.n);
        for (int j = 0; j < grid.n; ++j)
          wdiag[j] = std::pow(1.0 + grid.r[j] * grid.r[j], -delta / 2.0);
        ApplyOp ident;
        ident.apply = [](const std::vector<cxd>& x) { return x; };
        ident.apply_adj = [](const std::vector<cxd>& x) { return x; };
        auto smul = sobolev_wrap(eig, r, 0.0, ident, s); // <D>^{-s}
        ApplyOp op;
        op.apply = [smul, wdiag](const std::vector<cxd>& x) {
          auto y = smul.apply(x);
          kern::diag_mul(wdiag.data(), y.data(), y.data(), y.size());
          return y;
        };
        op.apply_adj = [smul, wdiag](const std::vector<cxd>& x) {
          std::vector<cxd> t(x.size());
          kern::diag_mul(wdiag.data(), x.data(), t.data(), x.size());
          return smul.apply_adj(t);
        };
        PowerIterOpts o = cfg.power;
        o.seed = cfg.power.seed ^ (0x9e3779b97f4a7c15ull * (ell + 1));
        auto nr = operator_norm(grid, op, o);
        if (!nr.converged) throw PowerIterError("power iteration stalled");
        if (nr.value > best) {
          best = nr.value;
          best_ell = ell;
        }
      }
      sample.value = best;
      sample.argmax_ell = best_ell;
      sample.ok = true;
      ++ok;
    } catch (const std::exception& e) {
      sample.error = e.what();
    }
    rep.samples.push_back(std::move(sample));
  }
  std::vector<double> xs, ys;
  for (auto& smp : rep.samples)
    if (smp.ok && smp.value > 0.0) {
      xs.push_back(smp.r);
      ys.push_back(smp.value);
    }
  rep.fit = fit_loglog(xs, ys, cfg.drop_largest);
  if (!hypothesis_ok) {
    rep.verdict = Verdict::INCONCLUSIVE;
    rep.note = "hypothesis violated by design (needs 0 <= s < d/2, delta > s)";
  } else if (ok < cfg.ray.count - cfg.ray.count / 5 || rep.fit.npts < 2) {
    rep.verdict = Verdict::INCONCLUSIVE;
  } else {
    rep.verdict = rep.fit.slope >= s - 0.1 ? Verdict::CONSISTENT
                                           : Verdict::VIOLATION;
    if (rep.fit.slope > s + 0.3)
      rep.note = "slope above sharpness window (informational)";
  }
  return rep;
}

ScalingReport scan_theta(const CoefficientProfile& profile, const ScanConfig& cfg,
                         int sigma, double rho, double s_in) {
  if (sigma < 0 || sigma > 2)
    throw std::invalid_argument("scan_theta: sigma in {0,1,2}");
  if (!(rho < profile.rho0()))
    throw std::invalid_argument("scan_theta: rho < rho0 required");
  const int d = profile.d();
  const int sp = sigma == 2 ? 1 : 0;
  double s = s_in;
  if (s < 0.0) {
    // largest comfortable s below the admissible ceiling d/2 + sigma'
    s = std::min(sigma + rho, 0.5 * d + sp - 0.2);
    const double floor = -0.5 * d - sp + sigma + rho;
    if (s <= floor) s = 0.5 * (floor + 0.5 * d + sp);
  }
  ScalingReport rep;
  rep.name = "theta sigma=" + std::to_string(sigma);
  rep.predicted = sigma + rho;
  rep.tolerance = cfg.slope_tol;
  const double s_out = s - sigma - rho;
  const auto rs = geometric_samples(cfg.ray.r_lo, cfg.ray.r_hi, cfg.ray.count);
  const cxd dir{std::cos(cfg.ray.angle), std::sin(cfg.ray.angle)};
  int ok = 0;
  bool all_zero = true;
  for (double r : rs) {
    ScanSample sample;
    sample.r = r;
    try {
      double best = 0.0;
      int best_ell = 0;
      for (int ell = 0; ell <= cfg.ell_max; ++ell) {
        auto grid = SectorGrid::make(d, ell, cfg.grid_r_max, cfg.n_grid);
        auto eig = SectorEigen::get(grid);
        auto ctx = std::make_shared<ResolventContext>(profile, grid, CapSpec{});
        const cxd z = r * dir;
        const cxd zadj = -std::conj(z);
        const double sign = sigma == 1 ? -1.0 : 1.0;
        ApplyOp inner;
        inner.apply = [ctx, sigma, z](const std::vector<cxd>& x) {
          std::vector<cxd> y;
          ctx->apply_theta(sigma, z, x, y);
          return y;
        };
        inner.apply_adj = [ctx, sigma, zadj, sign](const std::vector<cxd>& x) {
          std::vector<cxd> y;
          ctx->apply_theta(sigma, zadj, x, y);
          if (sign < 0) kern::scale(cxd{sign, 0.0}, y.data(), y.size());
          return y;
        };
        ApplyOp op = sobolev_wrap(eig, r, s_out, inner, s);
        PowerIterOpts o = cfg.power;
        o.seed = cfg.power.seed ^ (0x9e3779b97f4a7c15ull * (ell + 1));
        auto nr = operator_norm(grid, op, o);
        if (!nr.converged) throw PowerIterError("power iteration stalled");
        if (nr.value > best) {
          best = nr.value;
          best_ell = ell;
        }
      }
      sample.value = best;
      sample.argmax_ell = best_ell;
      sample.ok = true;
      if (best > 1e-13) all_zero = false;
      ++ok;
    } catch (const std::exception& e) {
      sample.error = e.what();
    }
    rep.samples.push_back(std::move(sample));
  }
  if (ok == cfg.ray.count && all_zero) {
    rep.verdict = Verdict::CONSISTENT;
    rep.note = "operator numerically zero";
    return rep;
  }
  std::vector<double> xs, ys;
  for (auto& smp : rep.samples)
    if (smp.ok && smp.value > 0.0) {
      xs.push_back(smp.r);
      ys.push_back(smp.value);
    }
  rep.fit = fit_loglog(xs, ys, cfg.drop_largest);
  if (ok < cfg.ray.count - cfg.ray.count / 5 || rep.fit.npts < 2)
    rep.verdict = Verdict::INCONCLUSIVE;
  else
    rep.verdict = rep.fit.slope >= sigma + rho - cfg.slope_tol
                      ? Verdict::CONSISTENT
                      : Verdict::VIOLATION;
  return rep;
}

} // namespace dwlab
