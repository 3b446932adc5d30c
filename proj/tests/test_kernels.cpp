#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwlab/kernels.hpp"
#include "helpers.hpp"

using namespace dwlab;
using namespace dwlab::kern;
using dwlab::testing::random_cx;
using dwlab::testing::random_real;

namespace {
// sizes covering the vector remainder paths
const std::vector<std::size_t> sizes{0, 1, 2, 3, 5, 8, 17, 256, 1001};
}

TEST_CASE("dot_w variants agree") {
  for (std::size_t n : sizes) {
    auto u = random_cx(n, 1), v = random_cx(n, 2);
    auto q = random_real(n, 3);
    for (auto& x : q) x = std::abs(x) + 0.1;
    const cxd a = detail::dot_w_scalar(q.data(), u.data(), v.data(), n);
    const cxd b = dot_w(q.data(), u.data(), v.data(), n);
    CHECK(std::abs(a - b) <= 1e-13 * (1.0 + std::abs(a)));
    const cxd c = detail::dot_w_scalar(nullptr, u.data(), v.data(), n);
    const cxd d = dot_w(nullptr, u.data(), v.data(), n);
    CHECK(std::abs(c - d) <= 1e-13 * (1.0 + std::abs(c)));
  }
}

TEST_CASE("axpy and scale variants agree") {
  for (std::size_t n : sizes) {
    auto x = random_cx(n, 4);
    auto y1 = random_cx(n, 5), y2 = y1;
    const cxd a{0.7, -1.3};
    detail::axpy_scalar(a, x.data(), y1.data(), n);
    axpy(a, x.data(), y2.data(), n);
    for (std::size_t j = 0; j < n; ++j)
      CHECK(std::abs(y1[j] - y2[j]) <= 1e-14 * (1.0 + std::abs(y1[j])));

    auto s1 = x, s2 = x;
    detail::scale_scalar(a, s1.data(), n);
    scale(a, s2.data(), n);
    for (std::size_t j = 0; j < n; ++j)
      CHECK(std::abs(s1[j] - s2[j]) <= 1e-14 * (1.0 + std::abs(s1[j])));
  }
}

TEST_CASE("diagonal multiplies agree") {
  for (std::size_t n : sizes) {
    auto x = random_cx(n, 6);
    auto dr = random_real(n, 7);
    auto dc = random_cx(n, 8);
    std::vector<cxd> y1(n), y2(n);
    detail::diag_mul_scalar(dr.data(), x.data(), y1.data(), n);
    diag_mul(dr.data(), x.data(), y2.data(), n);
    for (std::size_t j = 0; j < n; ++j) CHECK(y1[j] == y2[j]);
    detail::cdiag_mul_scalar(dc.data(), x.data(), y1.data(), n);
    cdiag_mul(dc.data(), x.data(), y2.data(), n);
    for (std::size_t j = 0; j < n; ++j)
      CHECK(std::abs(y1[j] - y2[j]) <= 1e-14 * (1.0 + std::abs(y1[j])));
  }
}

TEST_CASE("tridiagonal matvec variants agree") {
  for (std::size_t n : sizes) {
    if (n == 0) continue;
    auto lo = random_cx(n, 9), di = random_cx(n, 10), up = random_cx(n, 11);
    auto x = random_cx(n, 12);
    std::vector<cxd> y1(n), y2(n);
    detail::tridiag_mul_scalar(lo.data(), di.data(), up.data(), x.data(),
                               y1.data(), n);
    tridiag_mul(lo.data(), di.data(), up.data(), x.data(), y2.data(), n);
    for (std::size_t j = 0; j < n; ++j)
      CHECK(std::abs(y1[j] - y2[j]) <= 1e-13 * (1.0 + std::abs(y1[j])));
  }
}

TEST_CASE("real kernels agree") {
  for (std::size_t n : sizes) {
    auto x = random_real(n, 13), y = random_real(n, 14);
    const double a = detail::ddot_scalar(x.data(), y.data(), n);
    const double b = ddot(x.data(), y.data(), n);
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
    auto y1 = y, y2 = y;
    detail::daxpy_scalar(0.37, x.data(), y1.data(), n);
    daxpy(0.37, x.data(), y2.data(), n);
    for (std::size_t j = 0; j < n; ++j)
      CHECK(y1[j] == doctest::Approx(y2[j]).epsilon(1e-14));
  }
}

TEST_CASE("isa name resolves") {
  const char* name = isa_name();
  CHECK((std::string(name) == "avx2" || std::string(name) == "scalar"));
}
