#include "dwlab/spectral.hpp"

#include <cmath>
#include <cstring>
#include <list>
#include <mutex>
#include <stdexcept>

#include "dwlab/kernels.hpp"

extern "C" {
void dstedc_(const char* compz, const int* n, double* d, double* e, double* z,
             const int* ldz, double* work, const int* lwork, int* iwork,
             const int* liwork, int* info);
void dstevr_(const char* jobz, const char* range, const int* n, double* d,
             double* e, const double* vl, const double* vu, const int* il,
             const int* iu, const double* abstol, int* m, double* w, double* z,
             const int* ldz, int* isuppz, double* work, const int* lwork,
             int* iwork, const int* liwork, int* info);
}

namespace dwlab {

namespace {

// symmetrized tridiagonal of a measure-symmetric SectorOperator: T = D A D^{-1}
void symmetrize(const SectorOperator& op, std::vector<double>& diag,
                std::vector<double>& off) {
  const int n = op.grid.n;
  diag.resize(n);
  off.resize(n > 1 ? n - 1 : 0);
  for (int j = 0; j < n; ++j) {
    const cxd d = op.mat.at(j, j);
    if (std::abs(d.imag()) > 1e-12 * (1.0 + std::abs(d.real())))
      throw std::runtime_error("symmetrize: operator has complex diagonal");
    diag[j] = d.real();
  }
  for (int j = 0; j + 1 < n; ++j) {
    const double up = op.mat.at(j, j + 1).real();
    const double lo = op.mat.at(j + 1, j).real();
    const double prod = up * lo;
    if (prod < -1e-30)
      throw std::runtime_error("symmetrize: off-diagonal sign mismatch");
    off[j] = (up >= 0.0 ? 1.0 : -1.0) * std::sqrt(std::max(prod, 0.0));
  }
}

} // namespace

SectorEigen::SectorEigen(const SectorGrid& grid) : grid_(grid) {
  const int n = grid.n;
  SectorOperator lap = assemble_free_laplacian(grid);
  // -Delta is PSD; symmetrize and flip sign
  std::vector<double> diag, off;
  symmetrize(lap, diag, off);
  lambda_.resize(n);
  for (int j = 0; j < n; ++j) lambda_[j] = -diag[j];
  std::vector<double> e(off.size());
  for (std::size_t j = 0; j < off.size(); ++j) e[j] = -off[j];

  z_.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) z_[static_cast<std::size_t>(j) * n + j] = 1.0;

  const char compz = 'I';
  int info = 0, lwork = -1, liwork = -1;
  double wq = 0.0;
  int iwq = 0;
  dstedc_(&compz, &n, lambda_.data(), e.data(), z_.data(), &n, &wq, &lwork,
          &iwq, &liwork, &info);
  lwork = static_cast<int>(wq);
  liwork = iwq;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dstedc_(&compz, &n, lambda_.data(), e.data(), z_.data(), &n, work.data(),
          &lwork, iwork.data(), &liwork, &info);
  if (info != 0) throw std::runtime_error("dstedc failed: tridiagonal eigensolve");

  sq_.resize(n);
  isq_.resize(n);
  for (int j = 0; j < n; ++j) {
    sq_[j] = std::sqrt(grid.q[j]);
    isq_[j] = 1.0 / sq_[j];
  }
}

void SectorEigen::to_coeffs(const double* x, double* c) const {
  const int n = grid_.n;
  std::vector<double> y(n);
  for (int j = 0; j < n; ++j) y[j] = sq_[j] * x[j];
  for (int k = 0; k < n; ++k)
    c[k] = kern::ddot(z_.data() + static_cast<std::size_t>(k) * n, y.data(), n);
}

void SectorEigen::from_coeffs(const double* c, double* x) const {
  const int n = grid_.n;
  std::vector<double> y(n, 0.0);
  for (int k = 0; k < n; ++k) {
    if (c[k] != 0.0)
      kern::daxpy(c[k], z_.data() + static_cast<std::size_t>(k) * n, y.data(), n);
  }
  for (int j = 0; j < n; ++j) x[j] = isq_[j] * y[j];
}

void SectorEigen::apply_multiplier(const std::function<double(double)>& f,
                                   const std::vector<cxd>& x,
                                   std::vector<cxd>& y) const {
  const int n = grid_.n;
  std::vector<double> re(n), im(n), cr(n), ci(n);
  for (int j = 0; j < n; ++j) {
    re[j] = x[j].real();
    im[j] = x[j].imag();
  }
  to_coeffs(re.data(), cr.data());
  to_coeffs(im.data(), ci.data());
  for (int k = 0; k < n; ++k) {
    const double m = f(lambda_[k]);
    cr[k] *= m;
    ci[k] *= m;
  }
  from_coeffs(cr.data(), re.data());
  from_coeffs(ci.data(), im.data());
  y.resize(n);
  for (int j = 0; j < n; ++j) y[j] = cxd{re[j], im[j]};
}

std::vector<double> SectorEigen::apply_multiplier(
    const std::function<double(double)>& f, const std::vector<double>& x) const {
  const int n = grid_.n;
  std::vector<double> c(n), y(n);
  to_coeffs(x.data(), c.data());
  for (int k = 0; k < n; ++k) c[k] *= f(lambda_[k]);
  from_coeffs(c.data(), y.data());
  return y;
}

namespace {
std::mutex cache_mutex;
std::list<std::shared_ptr<const SectorEigen>> cache; // newest first, small LRU
constexpr std::size_t kCacheCap = 2;
} // namespace

std::shared_ptr<const SectorEigen> SectorEigen::get(const SectorGrid& grid) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  for (auto it = cache.begin(); it != cache.end(); ++it) {
    if ((*it)->grid().same_shape(grid)) {
      auto sp = *it;
      cache.erase(it);
      cache.push_front(sp);
      return sp;
    }
  }
  auto sp = std::make_shared<const SectorEigen>(grid);
  cache.push_front(sp);
  while (cache.size() > kCacheCap) cache.pop_back();
  return sp;
}

void SectorEigen::clear_cache() {
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache.clear();
}

RangedEig ranged_eig_measure(const SectorOperator& op, double vl, double vu) {
  const int n = op.grid.n;
  std::vector<double> diag, off;
  symmetrize(op, diag, off);
  std::vector<double> e(n, 0.0);
  std::copy(off.begin(), off.end(), e.begin());

  const char range = 'V';
  const int il = 0, iu = 0;
  const double abstol = 0.0;
  int m = 0, info = 0;
  std::vector<double> w(n);
  int ldz = n;
  std::vector<int> isuppz(2 * static_cast<std::size_t>(n) + 2);

  auto run = [&](char jobz, double* zdata) {
    int lwork = -1, liwork = -1;
    double wq = 0.0;
    int iwq = 0;
    std::vector<double> d2 = diag, e2 = e; // dstevr overwrites d/e
    dstevr_(&jobz, &range, &n, d2.data(), e2.data(), &vl, &vu, &il, &iu,
            &abstol, &m, w.data(), zdata, &ldz, isuppz.data(), &wq, &lwork,
            &iwq, &liwork, &info);
    lwork = static_cast<int>(wq);
    liwork = iwq;
    std::vector<double> work(static_cast<std::size_t>(lwork));
    std::vector<int> iwork(static_cast<std::size_t>(liwork));
    d2 = diag;
    e2 = e;
    dstevr_(&jobz, &range, &n, d2.data(), e2.data(), &vl, &vu, &il, &iu,
            &abstol, &m, w.data(), zdata, &ldz, isuppz.data(), work.data(),
            &lwork, iwork.data(), &liwork, &info);
    if (info != 0) throw std::runtime_error("dstevr failed: ranged eigensolve");
  };

  std::vector<double> zdummy(1);
  run('N', zdummy.data()); // count first
  std::vector<double> z(static_cast<std::size_t>(n) * std::max(1, m));
  run('V', z.data());

  RangedEig out;
  out.lambda.assign(w.begin(), w.begin() + m);
  out.vecs.resize(m);
  for (int k = 0; k < m; ++k) {
    out.vecs[k].resize(n);
    for (int j = 0; j < n; ++j)
      out.vecs[k][j] = z[static_cast<std::size_t>(k) * ldz + j] / std::sqrt(op.grid.q[j]);
  }
  return out;
}

SobolevScale::SobolevScale(std::shared_ptr<const SectorEigen> eig, double r)
    : eig_(std::move(eig)), r_(r) {
  if (!(r_ > 0.0 && r_ <= 1.0))
    throw std::invalid_argument("sobolev_scale: r in (0,1] required");
}

std::vector<cxd> SobolevScale::apply(double s, const std::vector<cxd>& x) const {
  if (s == 0.0) return x;
  std::vector<cxd> y;
  const double r2 = r_ * r_;
  eig_->apply_multiplier(
      [s, r2](double lam) { return std::pow(1.0 + std::max(lam, 0.0) / r2, 0.5 * s); },
      x, y);
  return y;
}

double SobolevScale::norm_hs(double s, const std::vector<cxd>& x) const {
  if (s == 0.0) return norm(eig_->grid(), x);
  auto y = apply(s, x);
  return norm(eig_->grid(), y);
}

SobolevScale sobolev_scale(const SectorGrid& grid, double r) {
  return SobolevScale(SectorEigen::get(grid), r);
}

} // namespace dwlab
