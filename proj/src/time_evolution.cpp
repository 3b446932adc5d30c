#include "dwlab/time_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dwlab {

WaveEvolver::WaveEvolver(const CoefficientProfile& profile,
                         const SectorGrid& grid, double dt)
    : profile_(profile), grid_(grid), dt_(dt) {
  if (dt <= 0.0) throw std::invalid_argument("WaveEvolver: dt > 0 required");
  gamma_ = std::max(profile.c_g(), profile.c_w());
  auto lap = assemble_laplacian(profile, grid);
  const int n = grid.n;
  lap_lo_.resize(n);
  lap_di_.resize(n);
  lap_up_.resize(n);
  for (int j = 0; j < n; ++j) {
    lap_di_[j] = lap.mat.at(j, j).real();
    lap_lo_[j] = j > 0 ? lap.mat.at(j, j - 1).real() : 0.0;
    lap_up_[j] = j + 1 < n ? lap.mat.at(j, j + 1).real() : 0.0;
  }
  winv_.resize(n);
  adiag_.resize(n);
  dc_.resize(n);
  for (int j = 0; j < n; ++j) {
    winv_[j] = 1.0 / profile.w(grid.r[j]);
    adiag_[j] = profile.a(grid.r[j]);
    dc_[j] = winv_[j] / (1.0 + 0.5 * dt * adiag_[j]);
  }
  // M = I - (dt^2/4) diag(dc) Delta_G
  const double c = 0.25 * dt * dt;
  std::vector<std::vector<double>> diags(3, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    diags[1][j] = 1.0 - c * dc_[j] * lap_di_[j];
    if (j > 0) diags[0][j] = -c * dc_[j] * lap_lo_[j];
    if (j + 1 < n) diags[2][j] = -c * dc_[j] * lap_up_[j];
  }
  step_lu_ = std::make_unique<RealBandedLU>(n, 1, 1, diags);
  if (step_lu_->singular())
    throw std::runtime_error("WaveEvolver: singular step matrix");
}

void WaveEvolver::apply_lap(const std::vector<double>& x,
                            std::vector<double>& y) const {
  const int n = grid_.n;
  y.resize(n);
  y[0] = lap_di_[0] * x[0] + (n > 1 ? lap_up_[0] * x[1] : 0.0);
  for (int j = 1; j + 1 < n; ++j)
    y[j] = lap_lo_[j] * x[j - 1] + lap_di_[j] * x[j] + lap_up_[j] * x[j + 1];
  if (n > 1)
    y[n - 1] = lap_lo_[n - 1] * x[n - 2] + lap_di_[n - 1] * x[n - 1];
}

void WaveEvolver::step(WaveState& s) const {
  const int n = grid_.n;
  const double half = 0.5 * dt_;
  std::vector<double> lapu(n), alpha(n), beta(n), rhs(n);
  apply_lap(s.u, lapu);
  for (int j = 0; j < n; ++j) {
    alpha[j] = s.u[j] + half * winv_[j] * s.v[j];
    beta[j] = s.v[j] + half * (lapu[j] - adiag_[j] * s.v[j]);
    rhs[j] = alpha[j] + half * dc_[j] * beta[j];
  }
  step_lu_->solve_inplace(rhs.data());
  apply_lap(rhs, lapu);
  for (int j = 0; j < n; ++j) {
    s.u[j] = rhs[j];
    s.v[j] = (beta[j] + half * lapu[j]) / (1.0 + half * adiag_[j]);
  }
  s.t += dt_;
}

std::vector<WaveState> WaveEvolver::run(const std::vector<double>& f,
                                        const std::vector<double>& g,
                                        const std::vector<double>& t_samples) const {
  if (t_samples.empty()) return {};
  const double t_max = *std::max_element(t_samples.begin(), t_samples.end());
  const double r0 = support_radius(grid_, f, g);
  if (grid_.r_max <= r0 + gamma_ * t_max)
    throw std::invalid_argument(
        "evolve: r_max <= support + gamma*t_max; the wave could reach the "
        "boundary (enlarge r_max or shorten the horizon)");
  WaveState s;
  s.t = 0.0;
  s.u = f;
  s.v.resize(grid_.n);
  for (int j = 0; j < grid_.n; ++j) s.v[j] = profile_.w(grid_.r[j]) * g[j];

  std::vector<WaveState> out;
  std::size_t next = 0;
  std::vector<double> targets = t_samples;
  std::sort(targets.begin(), targets.end());
  const double eps = 0.5 * dt_;
  if (targets[0] <= eps) {
    out.push_back(s);
    ++next;
  }
  while (next < targets.size()) {
    step(s);
    if (s.t + eps >= targets[next]) {
      out.push_back(s);
      ++next;
    }
  }
  return out;
}

double WaveEvolver::modified_energy(const WaveState& s, double nu) const {
  std::vector<double> lapu;
  apply_lap(s.u, lapu);
  double e = 0.0;
  for (int j = 0; j < grid_.n; ++j) {
    e += grid_.q[j] * (-lapu[j] * s.u[j] + nu * nu * s.u[j] * s.u[j] +
                       winv_[j] * s.v[j] * s.v[j]);
  }
  return e;
}

std::vector<WaveState> evolve(const CoefficientProfile& profile,
                              const SectorGrid& grid,
                              const std::vector<double>& f,
                              const std::vector<double>& g,
                              const std::vector<double>& t_samples, double dt) {
  WaveEvolver ev(profile, grid, dt);
  return ev.run(f, g, t_samples);
}

std::vector<double> initial_data_f0(const CoefficientProfile& profile,
                                    const SectorGrid& grid,
                                    const std::vector<double>& f) {
  std::vector<double> f0(grid.n);
  for (int j = 0; j < grid.n; ++j) f0[j] = profile.w(grid.r[j]) * f[j];
  return f0;
}

std::vector<double> initial_data_g0(const CoefficientProfile& profile,
                                    const SectorGrid& grid,
                                    const std::vector<double>& f,
                                    const std::vector<double>& g) {
  std::vector<double> g0(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double w = profile.w(grid.r[j]);
    g0[j] = profile.a(grid.r[j]) * w * f[j] + w * g[j];
  }
  return g0;
}

namespace {

double wnorm(const SectorGrid& grid, const std::vector<double>& u, double delta) {
  double s = 0.0;
  for (int j = 0; j < grid.n; ++j)
    s += grid.q[j] * std::pow(1.0 + grid.r[j] * grid.r[j], -delta) * u[j] * u[j];
  return std::sqrt(s);
}

double bnorm(const SectorGrid& grid, const std::vector<double>& u, double R) {
  double s = 0.0;
  for (int j = 0; j < grid.n && grid.r[j] <= R; ++j) s += grid.q[j] * u[j] * u[j];
  return std::sqrt(s);
}

} // namespace

DecayReport profile_comparison(const CoefficientProfile& profile,
                               const SectorGrid& grid,
                               const std::vector<double>& f,
                               const std::vector<double>& g,
                               const ProfileCompareOptions& opts) {
  DecayReport rep;
  const int d = profile.d();
  rep.delta = opts.delta > 0.0 ? opts.delta : d + 3.0;
  rep.R_ball = opts.R_ball;
  const double r0 = support_radius(grid, f, g);
  rep.fit_lo = opts.t_lo > 0.0 ? opts.t_lo : 4.0 * 2.0 * r0;
  std::vector<double> ts = opts.t_samples;
  if (ts.empty()) {
    const double tmax =
        opts.t_hi > 0.0 ? opts.t_hi
                        : 0.9 * (grid.r_max - r0) / std::max(profile.c_g(),
                                                             profile.c_w());
    ts = geometric_samples(std::max(1.0, 0.25 * rep.fit_lo), tmax, 28);
  }
  rep.fit_hi = opts.t_hi > 0.0 ? opts.t_hi : ts.back();

  auto states = evolve(profile, grid, f, g, ts, opts.dt);
  const auto f0 = initial_data_f0(profile, grid, f);
  const auto g0 = initial_data_g0(profile, grid, f, g);
  FreePropagator prop(SectorEigen::get(grid));

  for (const auto& st : states) {
    auto free_state = prop.solution(f0, g0, st.t);
    std::vector<double> diff(grid.n);
    for (int j = 0; j < grid.n; ++j) diff[j] = st.u[j] - free_state.u[j];
    rep.series.t.push_back(st.t);
    rep.series.norm_local.push_back(bnorm(grid, st.u, rep.R_ball));
    rep.series.norm_weighted.push_back(wnorm(grid, st.u, rep.delta));
    rep.series.norm_diff.push_back(wnorm(grid, diff, rep.delta));
    rep.series.norm_free_weighted.push_back(wnorm(grid, free_state.u, rep.delta));
    const double den = rep.series.norm_free_weighted.back();
    rep.series.ratio.push_back(den > 0.0 ? rep.series.norm_diff.back() / den
                                         : 0.0);
  }

  rep.fit_local = fit_loglog_window(rep.series.t, rep.series.norm_local,
                                    rep.fit_lo, rep.fit_hi);
  rep.fit_weighted = fit_loglog_window(rep.series.t, rep.series.norm_weighted,
                                       rep.fit_lo, rep.fit_hi);
  rep.fit_diff = fit_loglog_window(rep.series.t, rep.series.norm_diff,
                                   rep.fit_lo, rep.fit_hi);
  rep.fit_ratio = fit_loglog_window(rep.series.t, rep.series.ratio, rep.fit_lo,
                                    rep.fit_hi);

  // decay exponents: f-part -d(-rho1), g-part 1-d(-rho1); with g present the
  // g-part dominates
  const bool has_g = wnorm(grid, g, 0.0) > 1e-14 || profile.a(0.0) > 0.0;
  rep.pred_local = has_g ? 1.0 - d : -static_cast<double>(d);
  rep.pred_diff = rep.pred_local - opts.rho1;
  rep.pred_ratio = -opts.rho1;

  rep.verdict_local = rep.fit_local.npts < 2 ? Verdict::INCONCLUSIVE
                      : rep.fit_local.slope <= rep.pred_local + opts.slope_tol
                          ? Verdict::CONSISTENT
                          : Verdict::VIOLATION;
  bool monotone = true;
  bool seen = false;
  double prev = 0.0;
  for (std::size_t i = 0; i < rep.series.t.size(); ++i) {
    if (rep.series.t[i] < rep.fit_lo || rep.series.t[i] > rep.fit_hi) continue;
    if (seen && rep.series.ratio[i] > prev) monotone = false;
    prev = rep.series.ratio[i];
    seen = true;
  }
  rep.ratio_monotone = seen && monotone;
  rep.verdict_ratio = rep.fit_ratio.npts < 2 ? Verdict::INCONCLUSIVE
                      : (rep.ratio_monotone &&
                         rep.fit_ratio.slope <= rep.pred_ratio + opts.slope_tol)
                          ? Verdict::CONSISTENT
                          : Verdict::VIOLATION;
  return rep;
}

SynthesisResult fourier_synthesis_crosscheck(const CoefficientProfile& profile,
                                             const SectorGrid& grid,
                                             const std::vector<double>& f,
                                             const std::vector<double>& g,
                                             double mu,
                                             const std::vector<double>& t_list,
                                             const SynthesisOptions& opts) {
  if (mu <= 0.0)
    throw std::invalid_argument("fourier_synthesis_crosscheck: mu > 0 required");
  SynthesisResult res;
  res.mu = mu;
  res.t = t_list;
  const int n = grid.n;
  ResolventContext ctx(profile, grid);

  // F_z = (aw - izw) f + wg ; the z-independent and z-linear parts
  std::vector<double> awf(n), wf(n), wg(n);
  for (int j = 0; j < n; ++j) {
    const double w = profile.w(grid.r[j]);
    awf[j] = profile.a(grid.r[j]) * w * f[j];
    wf[j] = w * f[j];
    wg[j] = w * g[j];
  }

  const int ntau = static_cast<int>(std::ceil(opts.tau_max / opts.dtau));
  // accumulators for full range and half range (range-doubling check)
  std::vector<std::vector<double>> acc_full(t_list.size(),
                                            std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> acc_half(t_list.size(),
                                            std::vector<double>(n, 0.0));

  std::vector<cxd> rhs(n), m(n);
  for (int k = 0; k <= ntau; ++k) {
    const double tau = k * opts.dtau;
    const cxd z{tau, mu};
    const cxd iz{-mu, tau};
    for (int j = 0; j < n; ++j) rhs[j] = awf[j] - iz * wf[j] + wg[j];
    // factor locally: the tau sweep would otherwise fill the context cache
    auto pz = ctx.assemble_pz(z);
    BandedLU lu(pz.mat);
    std::vector<cxd> v(n);
    lu.solve(rhs.data(), v.data());
    // subtract the closed-form tail i f / z - g / z^2
    const cxd invz = 1.0 / z;
    for (int j = 0; j < n; ++j)
      v[j] -= cxd{0.0, 1.0} * invz * f[j] - invz * invz * g[j];
    // fold the tau < 0 half (conjugate symmetry): integrand 2 Re(e^{-it tau} v)
    const double wq = (k == 0 || k == ntau) ? 0.5 : 1.0; // trapezoid
    const double wq_half = (k == 0 || k == ntau / 2) ? 0.5 : 1.0;
    for (std::size_t it = 0; it < t_list.size(); ++it) {
      const double t = t_list[it];
      const cxd phase{std::cos(t * tau), -std::sin(t * tau)}; // e^{-i t tau}
      const double fac = 2.0 * wq * opts.dtau;
      const double fac_half = 2.0 * wq_half * opts.dtau;
      for (int j = 0; j < n; ++j) {
        const double c = (phase * v[j]).real();
        acc_full[it][j] += fac * c;
        if (k <= ntau / 2) acc_half[it][j] += fac_half * c;
      }
    }
  }

  // evolve oracle on the same grid
  auto states = evolve(profile, grid, f, g, t_list, opts.dt_evolve);

  res.u_synth.resize(t_list.size());
  double max_range_change = 0.0;
  for (std::size_t it = 0; it < t_list.size(); ++it) {
    const double t = t_list[it];
    const double amp = std::exp(t * mu) / (2.0 * M_PI);
    std::vector<double> u(n), u_half(n);
    for (int j = 0; j < n; ++j) {
      u[j] = f[j] + t * g[j] + amp * acc_full[it][j];
      u_half[j] = f[j] + t * g[j] + amp * acc_half[it][j];
    }
    double dev = 0.0, den = 0.0, drange = 0.0;
    for (int j = 0; j < n; ++j) {
      const double e = u[j] - states[it].u[j];
      dev += grid.q[j] * e * e;
      den += grid.q[j] * states[it].u[j] * states[it].u[j];
      const double er = u[j] - u_half[j];
      drange += grid.q[j] * er * er;
    }
    res.deviation.push_back(den > 0.0 ? std::sqrt(dev / den) : 0.0);
    max_range_change =
        std::max(max_range_change, den > 0.0 ? std::sqrt(drange / den) : 0.0);
    res.u_synth[it] = std::move(u);
  }
  res.range_doubling_change = max_range_change;
  res.converged = max_range_change < 0.02;
  return res;
}

} // namespace dwlab
