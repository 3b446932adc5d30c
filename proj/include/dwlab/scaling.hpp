#pragma once

#include <string>

#include "dwlab/resolvent.hpp"
#include "dwlab/spectral.hpp"

namespace dwlab {

enum class Verdict { CONSISTENT, VIOLATION, INCONCLUSIVE };

const char* verdict_name(Verdict v);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0; // rms residual in log space
  int npts = 0;
};

// least squares on (log x, log y); drop_largest removes that many of the
// largest x before fitting (preasymptotic samples)
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                    int drop_largest = 0);
SlopeFit fit_loglog_window(const std::vector<double>& x,
                           const std::vector<double>& y, double x_lo, double x_hi);

std::vector<double> geometric_samples(double lo, double hi, int count);

struct ScanSample {
  double r = 0.0;
  double value = 0.0;
  int argmax_ell = 0;
  bool ok = false;
  std::string error;
};

struct ScalingReport {
  std::string name;
  std::vector<ScanSample> samples;
  SlopeFit fit;
  double predicted = 0.0;
  double tolerance = 0.15;
  Verdict verdict = Verdict::INCONCLUSIVE;
  double ratio_max_min = 0.0; // over fitted samples; boundedness witness
  std::string note;
};

// exponent formulas
double predicted_exponent_single(int d, int n);            // min(d-n-2, 0)
double predicted_exponent_diff(int d, double rho1, int n); // min(d+rho1-n-2, 0)

struct RaySpec {
  double angle = M_PI / 2.0; // z = r e^{i angle}
  double r_lo = 1e-3;
  double r_hi = 0.3;
  int count = 12;
};

enum class DomainPolicy { Fixed, Scaled }; // Scaled: r_max grows like 4*pi/r

struct ScanConfig {
  int n_grid = 4096;
  double grid_r_max = 120.0;
  int ell_max = 2;
  RaySpec ray;
  double rho1 = 0.5;
  double slope_tol = 0.15;
  double residual_threshold = 0.6; // rms log-residual above this: INCONCLUSIVE
  int drop_largest = 2;
  DomainPolicy domain = DomainPolicy::Fixed;
  double domain_scale = 4.0 * M_PI; // r_max >= domain_scale / r when Scaled
  PowerIterOpts power;
  CapSpec cap;
};

// weighted L^2 -> L^2 scan of a resolvent-product target along the ray;
// predicted exponent supplied by the caller (formulas above)
ScalingReport scan_resolvent(const CoefficientProfile& profile,
                             const ScanConfig& cfg, const NormTarget& target,
                             double deltaL, double deltaR, double predicted,
                             const std::string& name);

// |R(z)|_{L(H_z^{-1}, H_z^1)} * |z|^2 along the ray; expects boundedness
// above and below (factor window reported)
struct BoundednessReport {
  std::string name;
  std::vector<ScanSample> samples; // value = |R(z)| * |z|^2 in the scaled norms
  double ratio_max_min = 0.0;
  Verdict verdict = Verdict::INCONCLUSIVE;
};
BoundednessReport scan_resolvent_h1(const CoefficientProfile& profile,
                                    const ScanConfig& cfg);

// |<x>^{-delta} <D_r>^{-s}|: slope expected in [s - 0.1, s + 0.3]
ScalingReport scan_weight(const CoefficientProfile& profile, const ScanConfig& cfg,
                          double s, double delta);

// |theta_sigma(z)|_{L(H_z^s, H_z^{s-sigma-rho})}: slope >= sigma + rho - tol;
// s < 0 selects the default admissible choice
ScalingReport scan_theta(const CoefficientProfile& profile, const ScanConfig& cfg,
                         int sigma, double rho, double s_in = -1.0);

} // namespace dwlab
