#include "dwlab/mourre.hpp"

#include <cmath>

extern "C" {
void dsyev_(const char* jobz, const char* uplo, const int* n, double* a,
            const int* lda, double* w, double* work, const int* lwork,
            int* info);
}

namespace dwlab {

SectorOperator assemble_pr(const CoefficientProfile& profile,
                           const SectorGrid& grid, cxd z) {
  auto lap = assemble_laplacian(profile, grid);
  const double imz = z.imag(), rez2 = (z * z).real();
  BandedMatrix m(grid.n, 1, 1);
  for (int j = 0; j < grid.n; ++j) {
    const double r = grid.r[j];
    m.at(j, j) = -lap.mat.at(j, j).real() +
                 profile.a(r) * profile.w(r) * imz - profile.w(r) * rez2;
    if (j > 0) m.at(j, j - 1) = -lap.mat.at(j, j - 1).real();
    if (j + 1 < grid.n) m.at(j, j + 1) = -lap.mat.at(j, j + 1).real();
  }
  return {grid, std::move(m), Symmetry::SelfadjointInMeasure};
}

SectorOperator assemble_k(const CoefficientProfile& profile,
                          const SectorGrid& grid, cxd z) {
  // radial (x.grad) of a radial coefficient is r d/dr
  auto div_rgp = assemble_divform(
      [&profile](double r) { return r * profile.dg(r); }, grid);
  const double imz = z.imag(), rez2 = (z * z).real();
  BandedMatrix m = div_rgp.mat;
  for (int j = 0; j < grid.n; ++j) {
    const double r = grid.r[j];
    const double aw = profile.a(r) * profile.w(r);
    const double daw = profile.da(r) * profile.w(r) + profile.a(r) * profile.dw(r);
    m.at(j, j) += -imz * r * daw + rez2 * r * profile.dw(r) // K_1 diagonal part
                  - 2.0 * imz * aw + 2.0 * rez2 * (profile.w(r) - 1.0); // K_2
  }
  return {grid, std::move(m), Symmetry::General};
}

SectorOperator assemble_commutator_pr_ia(const CoefficientProfile& profile,
                                         const SectorGrid& grid, cxd z) {
  auto pr = assemble_pr(profile, grid, z);
  // B = iA = d/2 + r d/dr (real)
  BandedMatrix b(grid.n, 1, 1);
  const double half_d = 0.5 * grid.d;
  for (int j = 0; j < grid.n; ++j) {
    b.at(j, j) = half_d;
    const double c = grid.r[j] / (2.0 * grid.h);
    if (j > 0) b.at(j, j - 1) = -c;
    if (j + 1 < grid.n) b.at(j, j + 1) = c;
  }
  auto pb = BandedMatrix::mul(pr.mat, b);
  auto bp = BandedMatrix::mul(b, pr.mat);
  return {grid, BandedMatrix::add(pb, cxd{-1.0, 0.0}, bp), Symmetry::General};
}

namespace {

std::vector<double> interior_bump(const SectorGrid& grid, double center,
                                  double width) {
  std::vector<double> v(grid.n, 0.0);
  for (int j = 0; j < grid.n; ++j) {
    const double x = (grid.r[j] - center) / width;
    if (std::abs(x) < 1.0) v[j] = std::exp(1.0 - 1.0 / (1.0 - x * x));
  }
  return v;
}

} // namespace

double commutator_identity_residual(const CoefficientProfile& profile,
                                    const SectorGrid& grid, cxd z,
                                    int n_testvecs) {
  auto comm = assemble_commutator_pr_ia(profile, grid, z);
  auto pr = assemble_pr(profile, grid, z);
  auto k = assemble_k(profile, grid, z);
  const double rez2 = (z * z).real();
  double worst = 0.0;
  for (int t = 0; t < n_testvecs; ++t) {
    const double center = grid.r_max * (0.25 + 0.5 * t / std::max(1, n_testvecs - 1));
    auto phi = to_cx(interior_bump(grid, center, 0.15 * grid.r_max));
    std::vector<cxd> lhs(grid.n), t1(grid.n), t2(grid.n);
    comm.mat.matvec(phi.data(), lhs.data());
    pr.mat.matvec(phi.data(), t1.data());
    k.mat.matvec(phi.data(), t2.data());
    std::vector<cxd> res(grid.n);
    for (int j = 0; j < grid.n; ++j)
      res[j] = lhs[j] - 2.0 * t1[j] - 2.0 * rez2 * phi[j] - t2[j];
    const double den = norm(grid, phi);
    if (den > 0.0) worst = std::max(worst, norm(grid, res) / den);
  }
  return worst;
}

double k_operator_bound(const CoefficientProfile& profile, const SectorGrid& grid,
                        cxd z, double rho, const PowerIterOpts& opts) {
  auto k = assemble_k(profile, grid, z);
  auto kq = std::make_shared<BandedMatrix>(k.mat);
  auto eig = SectorEigen::get(grid);
  const double r = std::abs(z), r2 = r * r;
  auto wz = std::make_shared<std::vector<double>>(grid.n);
  for (int j = 0; j < grid.n; ++j)
    (*wz)[j] = std::pow(1.0 + r2 * grid.r[j] * grid.r[j], 0.5 * rho);
  const auto q = grid.q;

  auto mult = [eig, r2](double s, const std::vector<cxd>& x) {
    std::vector<cxd> y;
    eig->apply_multiplier(
        [s, r2](double lam) {
          return std::pow(1.0 + std::max(lam, 0.0) / r2, 0.5 * s);
        },
        x, y);
    return y;
  };
  // T = <D>^{-1} K <zx>^rho <D>^{-1}
  ApplyOp op;
  op.apply = [kq, wz, mult](const std::vector<cxd>& x) {
    auto y = mult(-1.0, x);
    std::vector<cxd> t(y.size());
    kern::diag_mul(wz->data(), y.data(), t.data(), y.size());
    std::vector<cxd> u(y.size());
    kq->matvec(t.data(), u.data());
    return mult(-1.0, u);
  };
  // K real banded; adjoint in measure
  auto kadj = std::make_shared<BandedMatrix>(k.mat.adjoint_in_measure(q));
  op.apply_adj = [kadj, wz, mult](const std::vector<cxd>& x) {
    auto y = mult(-1.0, x);
    std::vector<cxd> u(y.size());
    kadj->matvec(y.data(), u.data());
    std::vector<cxd> t(u.size());
    kern::diag_mul(wz->data(), u.data(), t.data(), u.size());
    return mult(-1.0, t);
  };
  auto nr = operator_norm(grid, op, opts);
  if (!nr.converged) throw PowerIterError("k_operator_bound: power iteration stalled");
  return nr.value / std::norm(z);
}

double plateau_cutoff(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return 1.0;
  if (ax >= 2.0) return 0.0;
  auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double a = psi(2.0 - ax), b = psi(ax - 1.0);
  return a / (a + b);
}

MourreAudit mourre_positivity(const CoefficientProfile& profile,
                              const SectorGrid& grid, cxd z, double eta,
                              double margin_tol, CommutatorRoute route) {
  if (!in_dr_plus(z))
    throw std::invalid_argument("mourre_positivity: z must lie in D_R^+");
  if (!(eta > 0.0 && eta <= 1.0 / 32.0 + 1e-15))
    throw std::invalid_argument("mourre_positivity: eta in (0, 1/32] required");
  MourreAudit audit;
  audit.z = z;
  audit.eta = eta;
  audit.route = route;
  const double z2 = std::norm(z);

  auto pr = assemble_pr(profile, grid, z);
  auto pairs = ranged_eig_measure(pr, -2.0 * eta * z2, 2.0 * eta * z2);
  std::vector<int> keep;
  std::vector<double> weight;
  for (std::size_t k = 0; k < pairs.lambda.size(); ++k) {
    const double w = plateau_cutoff(pairs.lambda[k] / (eta * z2));
    if (w > 1e-8) {
      keep.push_back(static_cast<int>(k));
      weight.push_back(w);
    }
  }
  audit.window_size = static_cast<int>(keep.size());
  if (keep.empty()) {
    audit.window_empty = true;
    audit.verdict = Verdict::INCONCLUSIVE;
    return audit;
  }

  SectorOperator comm;
  if (route == CommutatorRoute::ExplicitMatrix) {
    comm = assemble_commutator_pr_ia(profile, grid, z);
  } else {
    // M = 2 P_R + 2 Re(z^2) + K(z)
    auto pr2 = assemble_pr(profile, grid, z);
    auto k = assemble_k(profile, grid, z);
    BandedMatrix m2 = BandedMatrix::add(pr2.mat, cxd{0.5, 0.0}, k.mat);
    // scale: add gives pr + 0.5 k; want 2 pr + k = 2(pr + 0.5 k)
    const double rez2 = (z * z).real();
    BandedMatrix mm(grid.n, std::max(m2.kl(), 0), std::max(m2.ku(), 0));
    for (int off = -mm.kl(); off <= mm.ku(); ++off) {
      auto& dd = mm.diag(off);
      const auto& sd = m2.diag(off);
      for (int j = 0; j < grid.n; ++j) dd[j] = 2.0 * sd[j];
    }
    for (int j = 0; j < grid.n; ++j) mm.at(j, j) += 2.0 * rez2;
    comm = {grid, std::move(mm), Symmetry::General};
  }
  const int m = static_cast<int>(keep.size());
  std::vector<double> c(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<cxd> mv(grid.n);
  for (int l = 0; l < m; ++l) {
    auto el = to_cx(pairs.vecs[keep[l]]);
    comm.mat.matvec(el.data(), mv.data());
    for (int k = 0; k < m; ++k) {
      const auto& ek = pairs.vecs[keep[k]];
      double ip = 0.0;
      for (int j = 0; j < grid.n; ++j) ip += grid.q[j] * ek[j] * mv[j].real();
      c[static_cast<std::size_t>(l) * m + k] =
          weight[k] * ip * weight[l] -
          (k == l ? 0.5 * z2 * weight[k] * weight[k] : 0.0);
    }
  }
  // symmetrize (Re of the projected form) and take the smallest eigenvalue
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < l; ++k) {
      const double s = 0.5 * (c[static_cast<std::size_t>(l) * m + k] +
                              c[static_cast<std::size_t>(k) * m + l]);
      c[static_cast<std::size_t>(l) * m + k] = s;
      c[static_cast<std::size_t>(k) * m + l] = s;
    }
  std::vector<double> evals(m);
  int info = 0, lwork = std::max(1, 3 * m);
  std::vector<double> work(static_cast<std::size_t>(lwork));
  const char jobz = 'N', uplo = 'U';
  dsyev_(&jobz, &uplo, &m, c.data(), &m, evals.data(), work.data(), &lwork, &info);
  if (info != 0) throw std::runtime_error("mourre_positivity: dsyev failed");
  audit.positivity_margin = evals[0];
  audit.margin_over_z2 = evals[0] / z2;
  audit.verdict = audit.margin_over_z2 >= -margin_tol ? Verdict::CONSISTENT
                                                      : Verdict::VIOLATION;
  return audit;
}

std::vector<double> apply_dilation(const SectorGrid& grid,
                                   const std::vector<double>& u, double theta) {
  const double scale = std::exp(theta);
  const double amp = std::exp(0.5 * grid.d * theta);
  std::vector<double> out(grid.n, 0.0);
  for (int j = 0; j < grid.n; ++j) {
    const double x = scale * grid.r[j];
    const double pos = x / grid.h - 1.0; // node index of x
    const int i1 = static_cast<int>(std::floor(pos));
    const double fr = pos - i1;
    // cubic Lagrange on nodes i1-1 .. i1+2, values outside the grid are 0
    auto val = [&](int i) {
      return (i >= 0 && i < grid.n) ? u[i] : 0.0;
    };
    if (i1 < -2 || i1 > grid.n) continue;
    const double vm1 = val(i1 - 1), v0 = val(i1), v1 = val(i1 + 1), v2 = val(i1 + 2);
    const double t = fr;
    const double c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    out[j] = amp * (c0 * vm1 + c1 * v0 + c2 * v1 + c3 * v2);
  }
  return out;
}

bool HypothesisReport::all_measured_pass() const {
  for (const auto& it : items)
    if (it.status == "FAIL") return false;
  return true;
}

HypothesisReport hypothesis_report(const CoefficientProfile& profile, cxd z,
                                   const HypothesisOptions& opts) {
  if (!in_dr_plus(z))
    throw std::invalid_argument("hypothesis_report: z must lie in D_R^+");
  HypothesisReport rep;
  rep.z = z;
  const double r = std::abs(z), r2 = r * r;
  auto grid = SectorGrid::make(profile.d(), 0, opts.grid_r_max, opts.n_grid);
  auto eig = SectorEigen::get(grid);
  SobolevScale scale(eig, r);

  auto h1norm = [&](const std::vector<double>& u) {
    return scale.norm_hs(1.0, to_cx(u));
  };

  // (H1) |phi|_{L^2} <= Upsilon |phi|_{H^1_z}
  {
    auto u = interior_bump(grid, 0.4 * grid.r_max, 0.2 * grid.r_max);
    const double ratio = norm(grid, to_cx(u)) / h1norm(u);
    rep.items.push_back({"H1-embedding", ratio <= 1.0 + 1e-10 ? "PASS" : "FAIL",
                         ratio, 1.0, "L2 vs H1_z norm ratio"});
  }
  // (H2) dilation propagator bounded on H^1_z: |e^{i theta A} u| <= e |u|
  {
    double worst = 0.0, group_err = 0.0;
    // support must stay inside the grid after dilation by e^{+-1}
    auto u = interior_bump(grid, 0.12 * grid.r_max, 0.05 * grid.r_max);
    const double nu = h1norm(u);
    for (double th : {-1.0, -0.5, 0.5, 1.0}) {
      auto du = apply_dilation(grid, u, th);
      worst = std::max(worst, h1norm(du) / nu);
      auto back = apply_dilation(grid, du, -th);
      std::vector<double> diff(grid.n);
      for (int j = 0; j < grid.n; ++j) diff[j] = back[j] - u[j];
      group_err = std::max(group_err,
                           norm(grid, to_cx(diff)) / norm(grid, to_cx(u)));
    }
    rep.items.push_back({"H2-propagator",
                         worst <= std::exp(1.0) * 1.05 ? "PASS" : "FAIL", worst,
                         std::exp(1.0), "sup over theta in {+-1, +-1/2}"});
    rep.items.push_back({"H2-group-law", group_err <= 1e-3 ? "PASS" : "FAIL",
                         group_err, 1e-3,
                         "interpolation error of e^{i theta A} e^{-i theta A}"});
  }
  // (H3a) |Q_z|_{L(H^1_z, H^-1_z)} <= Upsilon
  {
    ResolventContext ctx(profile, grid);
    auto pz = std::make_shared<BandedMatrix>(ctx.assemble_pz(z).mat);
    auto pz_adj =
        std::make_shared<BandedMatrix>(ctx.assemble_pz(-std::conj(z)).mat);
    auto eigp = eig;
    auto mult = [eigp, r2](double s, const std::vector<cxd>& x) {
      std::vector<cxd> y;
      eigp->apply_multiplier(
          [s, r2](double lam) {
            return std::pow(1.0 + std::max(lam, 0.0) / r2, 0.5 * s);
          },
          x, y);
      return y;
    };
    ApplyOp op;
    op.apply = [pz, mult](const std::vector<cxd>& x) {
      auto y = mult(-1.0, x);
      std::vector<cxd> t(y.size());
      pz->matvec(y.data(), t.data());
      return mult(-1.0, t);
    };
    // P(z)^dag = P(-conj z) in the measure inner product
    op.apply_adj = [pz_adj, mult](const std::vector<cxd>& x) {
      auto y = mult(-1.0, x);
      std::vector<cxd> t(y.size());
      pz_adj->matvec(y.data(), t.data());
      return mult(-1.0, t);
    };
    auto nr = operator_norm(grid, op, {});
    const double q_norm = nr.value / r2;
    rep.items.push_back({"H3a-Q-bound",
                         q_norm <= opts.upsilon_cap ? "PASS" : "FAIL", q_norm,
                         opts.upsilon_cap, "|Q_z| in L(H^1_z, H^-1_z)"});
    rep.items.push_back({"H3b-commutators", "SKIPPED", 0.0, 0.0,
                         "C^{N+1} classes beyond first order not audited"});
  }
  // (H4) Q_perp^+ = |z|^{-2}[Im(z^2)(w - w_min) + Re(z) a w] >= 0 pointwise
  {
    const double imz2 = (z * z).imag(), rez = z.real();
    double worst = 0.0;
    for (int j = 0; j < grid.n; ++j) {
      const double rr = grid.r[j];
      const double val = imz2 * (profile.w(rr) - profile.w_min()) +
                         rez * profile.a(rr) * profile.w(rr);
      worst = std::min(worst, val);
    }
    rep.items.push_back({"H4-Qperp-nonneg", worst >= -1e-12 ? "PASS" : "FAIL",
                         worst / r2, 0.0,
                         "pointwise Im(z^2)(w-w_min) + Re(z) a w"});
  }
  // (H5) projected positivity, best margin over the eta scan, both routes
  for (auto route : {CommutatorRoute::ExplicitMatrix, CommutatorRoute::IdentityRhs}) {
    double best = -1e300;
    double best_eta = opts.eta_list.empty() ? 1.0 / 32.0 : opts.eta_list[0];
    bool any_window = false;
    auto mgrid = choose_mourre_grid(profile.d(), r);
    for (double eta : opts.eta_list) {
      auto audit = mourre_positivity(profile, mgrid, z, eta, opts.margin_tol, route);
      if (audit.window_empty) continue;
      any_window = true;
      if (audit.margin_over_z2 > best) {
        best = audit.margin_over_z2;
        best_eta = eta;
      }
    }
    const bool expl = route == CommutatorRoute::ExplicitMatrix;
    const std::string name = expl ? "H5-positivity-explicit" : "H5-positivity-identity";
    const std::string extra =
        expl ? " (finite-volume virial: diagonal of the projected explicit "
               "commutator vanishes on eigenvectors; expected nonpositive)"
             : "";
    if (!any_window) {
      rep.items.push_back({name, "INCONCLUSIVE", 0.0, -opts.margin_tol,
                           "empty spectral window"});
    } else {
      rep.items.push_back({name, best >= -opts.margin_tol ? "PASS" : "FAIL",
                           best, -opts.margin_tol,
                           "best margin/|z|^2 at eta=" + std::to_string(best_eta) +
                               extra});
    }
  }
  return rep;
}

SectorGrid choose_mourre_grid(int d, double r, double h, double scale) {
  const double rmax = std::max(120.0, scale / r);
  const int n = static_cast<int>(std::lround(rmax / h)) - 1;
  return SectorGrid::make(d, 0, rmax, n);
}

} // namespace dwlab
