#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>

#include "dwlab/banded.hpp"
#include "dwlab/coefficients.hpp"
#include "dwlab/grid.hpp"
#include "dwlab/operators.hpp"

namespace dwlab {

// ---------------------------------------------------------------------------
// frequency points and admissible regions
// ---------------------------------------------------------------------------

enum class Region { DI, DRPlus, DRMinus, Other };

inline bool in_upper_disk(cxd z) { return z.imag() > 0.0 && std::abs(z) <= 1.0 + 1e-12; }
inline bool in_di(cxd z) {
  const double a = std::arg(z);
  return in_upper_disk(z) && a >= M_PI / 6.0 - 1e-12 && a <= 5.0 * M_PI / 6.0 + 1e-12;
}
inline bool in_dr_plus(cxd z) {
  return in_upper_disk(z) && 2.0 * z.real() >= std::norm(z) - 1e-12;
}
inline bool in_dr_minus(cxd z) {
  return in_upper_disk(z) && -2.0 * z.real() >= std::norm(z) - 1e-12;
}

struct FrequencyPoint {
  cxd z;
  Region region_tag = Region::Other;
  static FrequencyPoint classify(cxd z);
};

// ---------------------------------------------------------------------------
// symbolic product calculus
// ---------------------------------------------------------------------------

enum class SlotKind { PerturbedAtZ, PerturbedAtIr, FreeAtZ, FreeAtIr };

inline bool slot_free(SlotKind s) {
  return s == SlotKind::FreeAtZ || s == SlotKind::FreeAtIr;
}
inline bool slot_at_ir(SlotKind s) {
  return s == SlotKind::PerturbedAtIr || s == SlotKind::FreeAtIr;
}

// R gamma_{j1} R ... gamma_{jk} R with per-slot resolvent kinds. The gamma
// factors are the perturbed or free ones according to the chain family.
struct ResolventChain {
  std::vector<SlotKind> slots; // k+1 entries
  std::vector<int> gammas;     // k entries in {0,1,2}
  bool free_family = false;

  int k() const { return static_cast<int>(gammas.size()); }
  int abs_j() const {
    int s = 0;
    for (int j : gammas) s += j;
    return s;
  }
  // m(k, j) = 2(k+1) - |j|
  int m() const { return 2 * (k() + 1) - abs_j(); }

  static ResolventChain plain(SlotKind slot) { return {{slot}, {}, slot_free(slot)}; }
  static ResolventChain from_gammas(const std::vector<int>& j, SlotKind slot);
};

// Product R_{k,j}(z', z), optionally bridged by a theta_sigma factor into a
// perturbed left part and a free right part.
struct ResolventProduct {
  ResolventChain left;
  std::optional<int> theta_sigma;
  std::optional<ResolventChain> right;
  long long multiplicity = 1;

  bool bridged() const { return theta_sigma.has_value(); }
  // exponent budget: m(k,j) for a plain product, m_l - sigma + m_r bridged
  int m_budget() const {
    if (!bridged()) return left.m();
    return left.m() - *theta_sigma + right->m();
  }
};

// Terms of d^n/dz^n R(z) (or R_0): multiset of plain chains with j in {0,1}^k
// and m(k,j) = n + 2.
std::vector<ResolventProduct> derivative_terms(int n, bool free);

// Appendix-A style expansion of a plain all-at-z chain with j in {0,1}^k into
// chains carrying at least N resolvents at ir on the left. Every emitted term
// satisfies its m-identity exactly.
std::vector<ResolventProduct> expand_ir(const ResolventProduct& spec, int N);

// ---------------------------------------------------------------------------
// numerical realization on one sector
// ---------------------------------------------------------------------------

struct CapSpec {
  double strength = 0.0; // 0 disables; absorbing layer in the outer 15%
  double start_fraction = 0.85;
};

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caches P(z) factorizations and coefficient diagonals for one (profile,
// grid). Factorizations are immutable once built; solves are re-entrant.
class ResolventContext {
public:
  ResolventContext(const CoefficientProfile& profile, const SectorGrid& grid,
                   CapSpec cap = {});

  const SectorGrid& grid() const { return grid_; }
  const CoefficientProfile& profile() const { return profile_; }

  // P(z) = -Delta_G - i z a w - z^2 w (free variant: -Delta - z^2), with the
  // optional absorbing potential added to both
  SectorOperator assemble_pz(cxd z, bool free = false) const;

  // x = R(z) rhs with residual-certified banded solve
  std::vector<cxd> solve(cxd z, const std::vector<cxd>& rhs, bool free = false) const;
  void solve_inplace(cxd z, std::vector<cxd>& x, bool free = false) const;

  // diagonal gamma factors; j in {0,1,2}; gamma_2 uses r = |z|
  std::vector<cxd> gamma_diag(int j, cxd z, bool free) const;
  // theta_sigma(z): sigma in {0,1,2}; sigma=2 is banded (Delta_G - Delta + diag)
  void apply_theta(int sigma, cxd z, const std::vector<cxd>& x,
                   std::vector<cxd>& y) const;

  // chain and product application, right-to-left, matrix-free
  std::vector<cxd> apply_chain(const ResolventChain& chain, cxd z,
                               const std::vector<cxd>& rhs) const;
  std::vector<cxd> apply_product(const ResolventProduct& spec, cxd z,
                                 const std::vector<cxd>& rhs) const;
  // adjoint in the measure inner product (sign tracked exactly)
  std::vector<cxd> apply_product_adj(const ResolventProduct& spec, cxd z,
                                     const std::vector<cxd>& rhs) const;

  // R^{(n)}(z) x through the three-term recursion
  // P R^{(n)} = n gamma_1 R^{(n-1)} + n(n-1) w R^{(n-2)} (free analogue)
  std::vector<cxd> apply_deriv(int n, cxd z, const std::vector<cxd>& x,
                               bool free = false) const;
  // (R - R_0)^{(n)}(z) x as the theta-bridged multinomial sum; free_left
  // evaluates the R_0 theta R ordering (used by adjoints)
  std::vector<cxd> apply_diff_deriv(int n, cxd z, const std::vector<cxd>& x,
                                    bool free_left = false) const;

  const SectorOperator& lap_perturbed() const { return lap_g_; }
  const SectorOperator& lap_free() const { return lap_0_; }

  // Lax-Milgram style coercivity ratio at z (expected bounded below on D_I):
  // Re<e^{-i theta_z} P(z) u, u> / |z|^2 ||u||_{H^1_z}^2
  double coercivity_ratio(cxd z, const std::vector<cxd>& u) const;

private:
  const BandedLU& lu(cxd z, bool free) const;

  CoefficientProfile profile_;
  SectorGrid grid_;
  CapSpec cap_;
  SectorOperator lap_g_, lap_0_;
  std::vector<double> wdiag_, awdiag_, capdiag_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::pair<double, double>, bool>,
                   std::shared_ptr<const BandedLU>> lus_;
};

// ---------------------------------------------------------------------------
// weighted operator norms via power iteration on T^dag T
// ---------------------------------------------------------------------------

struct PowerIterOpts {
  double tol = 1e-4;
  int max_iter = 500;
  std::uint64_t seed = 0x5eed1ab5u;
};

struct ApplyOp {
  std::function<std::vector<cxd>(const std::vector<cxd>&)> apply;
  std::function<std::vector<cxd>(const std::vector<cxd>&)> apply_adj;
};

struct OperatorNormResult {
  double value = 0.0;
  int iters = 0;
  bool converged = false;
};

struct PowerIterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

OperatorNormResult operator_norm(const SectorGrid& grid, const ApplyOp& op,
                                 const PowerIterOpts& opts);

// target of a weighted-norm measurement
struct DerivTarget { int n = 0; bool free = false; };
struct DiffTarget { int n = 0; };
using NormTarget = std::variant<ResolventProduct, DerivTarget, DiffTarget>;

ApplyOp make_target_op(const ResolventContext& ctx, const NormTarget& target, cxd z);

struct WeightedNormResult {
  double value = 0.0;
  int argmax_ell = 0;
  std::vector<double> per_ell;
  int iters = 0;
};

// || <x>^{-deltaL} T <x>^{-deltaR} || in L(L^2), maximized over sectors
// ell = 0..ell_max. Deterministic given opts.seed.
WeightedNormResult weighted_norm(const CoefficientProfile& profile, int n_grid,
                                 double grid_r_max, double deltaL,
                                 const NormTarget& target, double deltaR, cxd z,
                                 int ell_max, const PowerIterOpts& opts = {},
                                 CapSpec cap = {});

// dense |T| oracle on small grids via LAPACK SVD (test/oracle path)
double dense_norm_oracle(const SectorGrid& grid, const ApplyOp& op);

} // namespace dwlab
