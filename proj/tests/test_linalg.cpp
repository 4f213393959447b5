#include "catch_amalgamated.hpp"
#include "morsekit/linalg.hpp"
#include "morsekit/nhd.hpp"
#include "morsekit/polys.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

using namespace morsekit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SymTridiag random_tridiag(std::mt19937 &rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> d(n), s(n - 1);
  for (auto &v : d)
    v = u(rng);
  for (auto &v : s)
    v = u(rng);
  return {d, s};
}

DenseMatrix random_symmetric(std::mt19937 &rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      m(i, j) = m(j, i) = u(rng);
  return m;
}

// Random orthogonal matrix by Gram-Schmidt on Gaussian columns.
DenseMatrix random_orthogonal(std::mt19937 &rng, std::size_t n) {
  std::normal_distribution<double> g;
  DenseMatrix q(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> v(n);
    for (auto &x : v)
      x = g(rng);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          dot += q(i, k) * v[i];
        for (std::size_t i = 0; i < n; ++i)
          v[i] -= dot * q(i, k);
      }
    double norm = 0.0;
    for (double x : v)
      norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i)
      q(i, j) = v[i] / norm;
  }
  return q;
}

double max_abs(const DenseMatrix &m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      r = std::max(r, std::abs(m(i, j)));
  return r;
}

void check_decomposition(const DenseMatrix &m, const EigenResult &r) {
  const std::size_t n = m.size();
  REQUIRE(r.vectors);
  const DenseMatrix &v = *r.vectors;
  const double norm = std::max(max_abs(m), 1.0);
  CHECK(std::is_sorted(r.values.begin(), r.values.end()));
  for (std::size_t k = 0; k < n; ++k) {
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = -r.values[k] * v(i, k);
      for (std::size_t j = 0; j < n; ++j)
        s += m(i, j) * v(j, k);
      res = std::max(res, std::abs(s));
    }
    CHECK(res <= 1e-11 * norm * double(n));
    for (std::size_t l = k; l < n; ++l) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        dot += v(i, k) * v(i, l);
      CHECK_THAT(dot, WithinAbs(k == l ? 1.0 : 0.0, 1e-10));
    }
  }
}

} // namespace

TEST_CASE("eigh_tridiag: Laguerre zeros", "[linalg]") {
  // L_3^1(y) = (24 - 36 y + 12 y^2 - y^3) / 6
  auto cubic = [](double y) { return 24 - 36 * y + 12 * y * y - y * y * y; };
  std::vector<double> roots;
  for (double a = 0.0; a < 20.0; a += 0.5) {
    double lo = a, hi = a + 0.5;
    if (cubic(lo) * cubic(hi) > 0)
      continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cubic(lo) * cubic(mid) <= 0 ? hi : lo) = mid;
    }
    roots.push_back(0.5 * (lo + hi));
  }
  REQUIRE(roots.size() == 3);
  const auto r = linalg::eigh_tridiag(polys::laguerre_y_matrix(1.0, 2));
  for (std::size_t i = 0; i < 3; ++i)
    CHECK_THAT(r.values[i], WithinAbs(roots[i], 1e-12));
}

TEST_CASE("eigh_tridiag: trivial cases", "[linalg]") {
  const auto one = linalg::eigh_tridiag(SymTridiag{{3.25}, {}}, true);
  CHECK(one.values == std::vector<double>{3.25});
  CHECK((*one.vectors)(0, 0) == 1.0);

  std::mt19937 rng(1);
  auto t = random_tridiag(rng, 12);
  auto flipped = t;
  for (std::size_t i = 0; i < flipped.sub.size(); i += 2)
    flipped.sub[i] = -flipped.sub[i];
  const auto a = linalg::eigh_tridiag(t).values;
  const auto b = linalg::eigh_tridiag(flipped).values;
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK_THAT(a[i], WithinAbs(b[i], 1e-12));
}

TEST_CASE("eigh_tridiag: randomized invariants", "[linalg]") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<std::size_t> un(2, 50);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = un(rng);
    const auto t = random_tridiag(rng, n);
    const auto r = linalg::eigh_tridiag(t, true);
    check_decomposition(linalg::to_dense(t), r);

    double trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trace += t.diag[i];
      sum += r.values[i];
    }
    double scale = 0.0;
    for (double v : r.values)
      scale += std::abs(v);
    CHECK(std::abs(trace - sum) <= 1e-10 * std::max(scale, 1.0));

    // Values alone agree with the vector run.
    const auto values_only = linalg::eigh_tridiag(t).values;
    for (std::size_t i = 0; i < n; ++i)
      CHECK_THAT(values_only[i], WithinAbs(r.values[i], 1e-12 * std::max(scale, 1.0)));

    if (n <= 10) {
      const auto minor = linalg::eigh_tridiag(t.leading(n - 1)).values;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        CHECK(r.values[i] <= minor[i] + 1e-12);
        CHECK(minor[i] <= r.values[i + 1] + 1e-12);
      }
    }
  }
}

TEST_CASE("eigh_dense", "[linalg]") {
  const auto id = linalg::eigh_dense(DenseMatrix::identity(5));
  for (double v : id.values)
    CHECK_THAT(v, WithinAbs(1.0, 1e-15));

  std::mt19937 rng(9);
  for (std::size_t n : {1u, 2u, 7u, 30u}) {
    const DenseMatrix q = random_orthogonal(rng, n);
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i)
      lambda[i] = -3.0 + 0.7 * double(i) + 0.01 * double(i * i);
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          s += q(i, k) * lambda[k] * q(j, k);
        m(i, j) = s;
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        m(i, j) = m(j, i);
    const auto r = linalg::eigh_dense(m, true);
    for (std::size_t i = 0; i < n; ++i)
      CHECK_THAT(r.values[i], WithinAbs(lambda[i], 1e-10));
    check_decomposition(m, r);
  }

  std::uniform_int_distribution<std::size_t> un(2, 50);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_symmetric(rng, un(rng));
    check_decomposition(m, linalg::eigh_dense(m, true));
  }
}

TEST_CASE("eigh_dense rejects asymmetric input", "[linalg]") {
  DenseMatrix m = DenseMatrix::identity(3);
  m(0, 2) = 0.5;
  try {
    linalg::eigh_dense(m);
    FAIL("no throw");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::contract);
  }
}

TEST_CASE("non-convergence reports numerical failure", "[linalg]") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    linalg::eigh_tridiag(SymTridiag{{1.0, nan, 2.0}, {0.5, 0.5}});
    FAIL("no throw");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::numerical_failure);
  }
}

TEST_CASE("Sturm count and bisection", "[linalg]") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_tridiag(rng, 40);
    const auto all = linalg::eigh_tridiag(t).values;
    const double cut = 0.3;
    const auto below = linalg::eigvals_below(t, cut);
    const auto n_below = std::size_t(
        std::count_if(all.begin(), all.end(), [&](double v) { return v < cut; }));
    REQUIRE(below.size() == n_below);
    CHECK(linalg::sturm_count(t, cut) == n_below);
    for (std::size_t i = 0; i < below.size(); ++i)
      CHECK_THAT(below[i], WithinAbs(all[i], 1e-11));
  }
}

TEST_CASE("200x200 NHD Hamiltonian is fast", "[linalg][perf]") {
  const PotentialParams p{2, -12, 1, 0.2, 1};
  const DenseMatrix h = nhd::hamiltonian(p, NhdConfig{200, 2.0});
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = linalg::eigh_dense(h);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.values.size() == 200);
  CHECK(secs < 1.0);
}
