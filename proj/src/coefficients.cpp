#include "dwlab/coefficients.hpp"

#include <algorithm>
#include <cmath>

namespace dwlab {

namespace {

// <r>^{-kappa} and its first two derivatives
double jap(double r, double kappa) { return std::pow(1.0 + r * r, -kappa / 2.0); }
double djap(double r, double kappa) {
  return -kappa * r * std::pow(1.0 + r * r, -kappa / 2.0 - 1.0);
}
double d2jap(double r, double kappa) {
  const double s = 1.0 + r * r;
  return -kappa * std::pow(s, -kappa / 2.0 - 2.0) * (1.0 - (kappa + 1.0) * r * r);
}

double bump_val(const Bump& b, double r) {
  const double u = (r - b.center) / b.width, v = (r + b.center) / b.width;
  return b.height * (std::exp(-0.5 * u * u) + std::exp(-0.5 * v * v));
}
double bump_d1(const Bump& b, double r) {
  const double u = (r - b.center) / b.width, v = (r + b.center) / b.width;
  return -b.height / b.width * (u * std::exp(-0.5 * u * u) + v * std::exp(-0.5 * v * v));
}
double bump_d2(const Bump& b, double r) {
  const double u = (r - b.center) / b.width, v = (r + b.center) / b.width;
  return b.height / (b.width * b.width) *
         ((u * u - 1.0) * std::exp(-0.5 * u * u) + (v * v - 1.0) * std::exp(-0.5 * v * v));
}

double bumps_sum(const std::vector<Bump>& bumps, char target, double r, int order) {
  double s = 0.0;
  for (const auto& b : bumps) {
    if (b.target != target) continue;
    s += order == 0 ? bump_val(b, r) : order == 1 ? bump_d1(b, r) : bump_d2(b, r);
  }
  return s;
}

} // namespace

CoefficientProfile CoefficientProfile::build(const ProfileConfig& cfg) {
  CoefficientProfile p(cfg);
  p.validate();
  return p;
}

double CoefficientProfile::g(double r) const {
  return 1.0 + cfg_.g_amp * jap(r, cfg_.rho0) + bumps_sum(cfg_.bumps, 'g', r, 0);
}
double CoefficientProfile::dg(double r) const {
  return cfg_.g_amp * djap(r, cfg_.rho0) + bumps_sum(cfg_.bumps, 'g', r, 1);
}
double CoefficientProfile::d2g(double r) const {
  return cfg_.g_amp * d2jap(r, cfg_.rho0) + bumps_sum(cfg_.bumps, 'g', r, 2);
}
double CoefficientProfile::w(double r) const {
  return 1.0 + cfg_.w_amp * jap(r, cfg_.rho0) + bumps_sum(cfg_.bumps, 'w', r, 0);
}
double CoefficientProfile::dw(double r) const {
  return cfg_.w_amp * djap(r, cfg_.rho0) + bumps_sum(cfg_.bumps, 'w', r, 1);
}
double CoefficientProfile::d2w(double r) const {
  return cfg_.w_amp * d2jap(r, cfg_.rho0) + bumps_sum(cfg_.bumps, 'w', r, 2);
}
double CoefficientProfile::a(double r) const {
  return cfg_.a_amp * jap(r, 1.0 + cfg_.rho0) + bumps_sum(cfg_.bumps, 'a', r, 0);
}
double CoefficientProfile::da(double r) const {
  return cfg_.a_amp * djap(r, 1.0 + cfg_.rho0) + bumps_sum(cfg_.bumps, 'a', r, 1);
}
double CoefficientProfile::d2a(double r) const {
  return cfg_.a_amp * d2jap(r, 1.0 + cfg_.rho0) + bumps_sum(cfg_.bumps, 'a', r, 2);
}

bool CoefficientProfile::is_free() const {
  return cfg_.g_amp == 0.0 && cfg_.w_amp == 0.0 && cfg_.a_amp == 0.0 &&
         cfg_.bumps.empty();
}

void CoefficientProfile::validate() {
  if (cfg_.d < 3) throw ProfileError("profile: dimension d >= 3 required");
  if (!(cfg_.rho0 > 0.0 && cfg_.rho0 <= 1.0))
    throw ProfileError("profile: rho0 must lie in (0,1]");
  if (cfg_.a_amp < 0.0) throw ProfileError("profile: a_amp must be >= 0");
  if (std::abs(cfg_.g_amp) > 0.5 || std::abs(cfg_.w_amp) > 0.5)
    throw ProfileError("profile: |g_amp|, |w_amp| <= 0.5 (non-trapping cap)");
  for (const auto& b : cfg_.bumps) {
    if (b.target != 'g' && b.target != 'w' && b.target != 'a')
      throw ProfileError("profile: bump target must be one of g, w, a");
    if (b.width <= 0.0) throw ProfileError("profile: bump width must be > 0");
  }
  double gmin = 1e300, gmax = -1e300, wmin = 1e300, wmax = -1e300, amin = 1e300;
  for (int j = 0; j <= 4096; ++j) {
    // geometric sweep 0..2^14 plus the origin
    const double r = j == 0 ? 0.0 : std::pow(2.0, 14.0 * (j / 4096.0)) - 1.0;
    gmin = std::min(gmin, g(r));
    gmax = std::max(gmax, g(r));
    wmin = std::min(wmin, w(r));
    wmax = std::max(wmax, w(r));
    amin = std::min(amin, a(r));
  }
  if (gmin <= 0.05) throw ProfileError("profile: ellipticity violated (g too small)");
  if (wmin <= 0.05) throw ProfileError("profile: positivity of w violated");
  if (amin < -1e-12) throw ProfileError("profile: a(r) < 0 somewhere");
  c_g_ = std::max(gmax, 1.0 / gmin);
  c_w_ = std::max(wmax, 1.0 / wmin);
  w_min_ = wmin;
}

RadialFunction CoefficientProfile::g_minus_1() const {
  return {[this](double r) { return g(r) - 1.0; },
          [this](double r) { return dg(r); },
          [this](double r) { return d2g(r); }};
}
RadialFunction CoefficientProfile::w_minus_1() const {
  return {[this](double r) { return w(r) - 1.0; },
          [this](double r) { return dw(r); },
          [this](double r) { return d2w(r); }};
}
RadialFunction CoefficientProfile::absorption() const {
  return {[this](double r) { return a(r); },
          [this](double r) { return da(r); },
          [this](double r) { return d2a(r); }};
}

SeminormEstimate seminorm(const RadialFunction& phi, double kappa, int max_order) {
  if (kappa < 0.0) throw std::invalid_argument("seminorm: kappa >= 0 required");
  if (!phi.f) throw std::invalid_argument("seminorm: missing evaluator");

  auto deriv = [&phi](double r, int m, double hstep) -> double {
    switch (m) {
      case 0: return phi.f(r);
      case 1:
        if (phi.df) return phi.df(r);
        return (phi.f(r + hstep) - phi.f(r - hstep)) / (2.0 * hstep);
      case 2:
        if (phi.d2f) return phi.d2f(r);
        return (phi.f(r + hstep) - 2.0 * phi.f(r) + phi.f(r - hstep)) / (hstep * hstep);
      default: {
        // centered difference of the highest analytic derivative
        auto base = [&](double x) {
          return phi.d2f ? phi.d2f(x)
                         : (phi.f(x + hstep) - 2.0 * phi.f(x) + phi.f(x - hstep)) /
                               (hstep * hstep);
        };
        double lo = base(r - hstep), hi = base(r + hstep);
        if (m == 3) return (hi - lo) / (2.0 * hstep);
        double mid = base(r);
        return (hi - 2.0 * mid + lo) / (hstep * hstep); // m == 4
      }
    }
  };
  if (max_order > 4)
    throw std::invalid_argument("seminorm: max_order <= 4 supported");

  // dyadic windows [0, 2^e]; the sup must stabilize as the window grows
  double prev_sup = -1.0;
  SeminormEstimate out{kappa, max_order, 0.0, 0.0};
  double sup = 0.0, arg = 0.0;
  double window_growth = 0.0;
  for (int e = 4; e <= 20; ++e) {
    const double lo = e == 4 ? 0.0 : std::pow(2.0, e - 1);
    const double hi = std::pow(2.0, e);
    const int samples = 512;
    for (int j = 0; j <= samples; ++j) {
      const double r = lo + (hi - lo) * j / samples;
      for (int m = 0; m <= max_order; ++m) {
        const double hstep = std::max(1e-4, 1e-3 * std::max(r, 1.0));
        const double v = std::pow(1.0 + r * r, (kappa + m) / 2.0) *
                         std::abs(deriv(r, m, hstep));
        if (v > sup) {
          sup = v;
          arg = r;
        }
      }
    }
    if (prev_sup > 0.0) window_growth = sup / prev_sup;
    prev_sup = sup;
  }
  // divergent if the sup is still climbing at the largest windows
  if (window_growth > 1.05 && arg > std::pow(2.0, 18))
    throw SeminormError("not in S^-kappa: weighted sup diverges along the grid");
  out.value = sup;
  out.argmax_r = arg;
  return out;
}

} // namespace dwlab
