#pragma once

#include "dwlab/scaling.hpp"

namespace dwlab {

// P_R(z) = -Delta_G + a w Im(z) - w Re(z^2): the selfadjoint part driving the
// conjugate-operator analysis on D_R^+
SectorOperator assemble_pr(const CoefficientProfile& profile,
                           const SectorGrid& grid, cxd z);

// K(z) = K_1(z) + K_2(z) with
//   K_1 = div((r g')grad) - Im(z) r (aw)' + Re(z^2) r w'
//   K_2 = -2 Im(z) a w + 2 Re(z^2) (w - 1)
SectorOperator assemble_k(const CoefficientProfile& profile,
                          const SectorGrid& grid, cxd z);

// explicit discrete commutator [P_R(z), iA] = P_R B - B P_R with B = iA real
SectorOperator assemble_commutator_pr_ia(const CoefficientProfile& profile,
                                         const SectorGrid& grid, cxd z);

// max over smooth interior test bumps of
// |([P_R, iA] - 2 P_R - 2 Re(z^2) - K(z)) phi| / |phi|
double commutator_identity_residual(const CoefficientProfile& profile,
                                    const SectorGrid& grid, cxd z,
                                    int n_testvecs = 4);

// |K(z) <zx>^rho|_{L(H_z^1, H_z^-1)} / |z|^2
double k_operator_bound(const CoefficientProfile& profile, const SectorGrid& grid,
                        cxd z, double rho, const PowerIterOpts& opts = {});

// How the projected commutator form is realized. ExplicitMatrix builds
// [P_R, iA] as the discrete product P_R B - B P_R; on the truncated domain
// its diagonal vanishes identically on eigenvectors of P_R (finite-volume
// virial identity), so the projected form cannot be positive there.
// IdentityRhs uses 2 P_R + 2 Re(z^2) + K(z), the closed form of the same
// commutator, which carries the positivity where 2 Re(z^2) >= |z|^2.
enum class CommutatorRoute { ExplicitMatrix, IdentityRhs };

struct MourreAudit {
  cxd z;
  double eta = 1.0 / 32.0;
  CommutatorRoute route = CommutatorRoute::ExplicitMatrix;
  double positivity_margin = 0.0; // smallest eigenvalue of the projected form
  double margin_over_z2 = 0.0;    // margin / |z|^2
  bool window_empty = false;
  int window_size = 0;
  Verdict verdict = Verdict::INCONCLUSIVE;
};

// Projected positivity audit: Pi = phi_eta(P_R(z)/|z|^2) built from the
// spectral window, C = Pi Re([P_R, iA]) Pi - (|z|^2/2) Pi^2, margin = smallest
// eigenvalue of C restricted to eigenvectors with phi-weight > 1e-8.
// Preconditions: z in D_R^+ and eta <= 1/32.
MourreAudit mourre_positivity(const CoefficientProfile& profile,
                              const SectorGrid& grid, cxd z, double eta,
                              double margin_tol = 0.05,
                              CommutatorRoute route = CommutatorRoute::ExplicitMatrix);

// smooth even cutoff: 1 on [-1,1], supported in (-2,2)
double plateau_cutoff(double x);

// dilation propagator (e^{i theta A} u)(r) = e^{d theta/2} u(e^theta r) by
// cubic interpolation on the grid
std::vector<double> apply_dilation(const SectorGrid& grid,
                                   const std::vector<double>& u, double theta);

struct HypothesisItem {
  std::string name;
  std::string status; // PASS / FAIL / SKIPPED / INCONCLUSIVE
  double measured = 0.0;
  double bound = 0.0;
  std::string note;
};

struct HypothesisReport {
  cxd z;
  std::vector<HypothesisItem> items;
  bool all_measured_pass() const;
};

struct HypothesisOptions {
  double upsilon_cap = 50.0;
  double margin_tol = 0.05;
  std::vector<double> eta_list{1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0};
  int n_grid = 4096;
  double grid_r_max = 120.0;
};

// checkable slices of the conjugate-operator hypotheses at one z in D_R^+
HypothesisReport hypothesis_report(const CoefficientProfile& profile, cxd z,
                                   const HypothesisOptions& opts = {});

// domain sized so the spectral window around Re(z^2) is resolved
SectorGrid choose_mourre_grid(int d, double r, double h = 0.05,
                              double scale = 150.0);

} // namespace dwlab
