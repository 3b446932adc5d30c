#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwlab {

struct ProfileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compactly-concentrated additive bump, symmetrized so the even extension at
// r = 0 stays smooth: h * [exp(-(r-c)^2/2s^2) + exp(-(r+c)^2/2s^2)].
struct Bump {
  char target = 'g'; // 'g', 'w' or 'a'
  double center = 0.0;
  double width = 1.0;
  double height = 0.0;
};

struct ProfileConfig {
  int d = 3;
  double rho0 = 1.0;
  double g_amp = 0.0;
  double w_amp = 0.0;
  double a_amp = 0.0;
  std::vector<Bump> bumps;
};

// Radial function with analytic derivatives up to second order.
struct RadialFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
};

// Coefficient triple (g, w, a) of the operator: metric density g(|x|) Id,
// weight w(|x|) and absorption index a(|x|), all long/short range:
//   g = 1 + g_amp <r>^{-rho0},  w = 1 + w_amp <r>^{-rho0},
//   a = a_amp <r>^{-1-rho0},    plus optional bumps.
class CoefficientProfile {
public:
  static CoefficientProfile build(const ProfileConfig& cfg);

  double g(double r) const;
  double dg(double r) const;
  double d2g(double r) const;
  double w(double r) const;
  double dw(double r) const;
  double d2w(double r) const;
  double a(double r) const;
  double da(double r) const;
  double d2a(double r) const;

  int d() const { return cfg_.d; }
  double rho0() const { return cfg_.rho0; }
  bool is_free() const;

  // ellipticity constants measured on a validation grid
  double c_g() const { return c_g_; }
  double c_w() const { return c_w_; }
  double w_min() const { return w_min_; }

  RadialFunction g_minus_1() const;
  RadialFunction w_minus_1() const;
  RadialFunction absorption() const;

  const ProfileConfig& config() const { return cfg_; }

private:
  explicit CoefficientProfile(ProfileConfig cfg) : cfg_(std::move(cfg)) {}
  void validate();

  ProfileConfig cfg_;
  double c_g_ = 1.0, c_w_ = 1.0, w_min_ = 1.0;
};

struct SeminormError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// sup over the sampled grid of <r>^{kappa+m} |d^m phi/dr^m| for m <= max_order.
struct SeminormEstimate {
  double kappa = 0.0;
  int max_order = 0;
  double value = 0.0;
  double argmax_r = 0.0;
};

// Certifies finiteness on a dyadic grid extending to r = 2^20; throws
// SeminormError("not in S^-kappa ...") when the sup keeps growing with the
// window. Derivatives beyond the analytic ones are taken by centered
// differences with a refinement guard.
SeminormEstimate seminorm(const RadialFunction& phi, double kappa, int max_order);

// default number of derivatives checked for dimension d: floor(d/2)+1
inline int default_seminorm_order(int d) { return d / 2 + 1; }

} // namespace dwlab
