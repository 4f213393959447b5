#include "catch_amalgamated.hpp"
#include "morsekit/linalg.hpp"
#include "morsekit/polys.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include <cmath>
#include <limits>
#include <random>

using namespace morsekit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Generalized binomial coefficient for real r.
double binom(double r, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i)
    c *= (r - i) / (i + 1);
  return c;
}

// Explicit sum for P_n^{(a,b)}(x).
double jacobi_explicit(double a, double b, int n, double x) {
  double s = 0.0;
  for (int k = 0; k <= n; ++k)
    s += binom(n + a, n - k) * binom(n + b, k) * std::pow(0.5 * (x - 1), k) *
         std::pow(0.5 * (x + 1), n - k);
  return s;
}

// Explicit sum for L_n^g(y); `mag` receives the sum of |terms|.
double laguerre_explicit(double g, int n, double y, double *mag = nullptr) {
  double s = 0.0, m = 0.0, fact = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0)
      fact *= k;
    const double term = binom(n + g, n - k) * std::pow(y, k) / fact;
    s += (k % 2 ? -1.0 : 1.0) * term;
    m += std::abs(term);
  }
  if (mag)
    *mag = m;
  return s;
}

// Five-point first and second derivatives.
template <class F> std::pair<double, double> derivs(F f, double x, double h) {
  const double fm2 = f(x - 2 * h), fm1 = f(x - h), f0 = f(x), fp1 = f(x + h),
               fp2 = f(x + 2 * h);
  return {(fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h),
          (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)};
}

// int_1^inf (y-1)^mu (y+1)^nu f(y) dy.
template <class F> double weighted_integral(double mu, double nu, F f) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto g = [&](double t) {
    const double v = std::pow(t, mu) * std::pow(t + 2, nu) * f(1 + t);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrator.integrate(g, 0.0, std::numeric_limits<double>::infinity(),
                              1e-13);
}

// mu in (0.3, 4), n_max in [0, 4], mu + nu + 2 n_max + 1 = -delta.
JacobiParams random_params(std::mt19937 &rng) {
  std::uniform_real_distribution<double> umu(0.3, 4.0), udelta(1.0, 4.0);
  std::uniform_int_distribution<int> un(0, 4);
  JacobiParams p;
  p.mu = umu(rng);
  p.n_max = un(rng);
  p.nu = -p.mu - 2 * p.n_max - 1 - udelta(rng);
  return p;
}

} // namespace

TEST_CASE("jacobi_eval low degrees", "[polys]") {
  const JacobiParams p{0.5, -9.5, 3};
  CHECK(polys::jacobi_eval(p, 0, 3.7) == 1.0);
  for (double y : {1.0, 1.5, 4.0, 20.0})
    CHECK_THAT(polys::jacobi_eval(p, 1, y),
               WithinRel(((p.mu + p.nu + 2) * y + p.mu - p.nu) / 2, 1e-14));
}

TEST_CASE("jacobi_eval matches the explicit sum", "[polys]") {
  const JacobiParams p{0.5, -9.5, 3};
  CHECK_THAT(polys::jacobi_eval(p, 3, 2.0),
             WithinRel(jacobi_explicit(0.5, -9.5, 3, 2.0), 1e-12));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uy(1.0, 12.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto jp = random_params(rng);
    const double y = uy(rng);
    for (int n = 0; n <= jp.n_max; ++n) {
      const double ref = jacobi_explicit(jp.mu, jp.nu, n, y);
      CHECK_THAT(polys::jacobi_eval(jp, n, y),
                 WithinAbs(ref, 1e-10 * std::max(1.0, std::abs(ref))));
    }
  }
}

TEST_CASE("jacobi_eval domain errors", "[polys]") {
  const JacobiParams p{0.5, -9.5, 3};
  CHECK_THROWS_AS(polys::jacobi_eval(p, 4, 2.0), Error);
  CHECK_THROWS_AS(polys::jacobi_eval(p, -1, 2.0), Error);
  try {
    polys::jacobi_eval(p, 1, 0.5);
    FAIL("no throw");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::domain);
  }
  // 2n + mu + nu = 0 at n = 1
  try {
    polys::detail::jacobi_all(1.0, -3.0, 3, 2.0);
    FAIL("no throw");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::singular_parameter);
  }
}

TEST_CASE("Jacobi ODE residual", "[polys]") {
  // (1-y^2) P'' + (nu - mu - (mu+nu+2) y) P' + n(n+mu+nu+1) P = 0
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uy(1.1, 10.0);
  const double h = 1e-3;
  for (int trial = 0; trial < 100; ++trial) {
    const auto jp = random_params(rng);
    const double y = uy(rng);
    for (int n = 0; n <= std::min(jp.n_max, 5); ++n) {
      auto P = [&](double x) { return polys::jacobi_eval(jp, n, x); };
      const double p0 = P(y);
      const auto [d1, d2] = derivs(P, y, h);
      const double r = (1 - y * y) * d2 +
                       (jp.nu - jp.mu - (jp.mu + jp.nu + 2) * y) * d1 +
                       n * (n + jp.mu + jp.nu + 1) * p0;
      // Scale by the size of the individual terms.
      const double scale = std::max({1.0, std::abs(p0), std::abs((1 - y * y) * d2),
                                     std::abs(n * (n + jp.mu + jp.nu + 1) * p0)});
      CHECK(std::abs(r) < 1e-6 * scale);
      // Exact derivative: P_n' = (n+mu+nu+1)/2 P_{n-1}^{(mu+1,nu+1)}
      if (n > 0) {
        const double exact =
            0.5 * (n + jp.mu + jp.nu + 1) *
            polys::detail::jacobi_all(jp.mu + 1, jp.nu + 1, n - 1, y)[std::size_t(n - 1)];
        CHECK_THAT(d1, WithinAbs(exact, 1e-7 * std::max(1.0, std::abs(exact))));
      }
    }
  }
}

TEST_CASE("jacobi_norm against quadrature", "[polys]") {
  const JacobiParams p{0.5, -9.5, 3};
  const double a0 = polys::jacobi_norm(p, 0);
  const double integral = weighted_integral(0.5, -9.5, [](double) { return 1.0; });
  CHECK_THAT(1 / (a0 * a0), WithinRel(integral, 1e-8));

  // Just inside the square-integrable region for k = 2, and just outside.
  const JacobiParams edge{0.7, -2 * 2 - 1.5 - 0.7, 2};
  const double a = polys::jacobi_norm(edge, 2);
  CHECK(std::isfinite(a));
  CHECK(a > 0);
  const JacobiParams outside{0.7, -2 * 2 - 0.5 - 0.7, 2};
  CHECK_THROWS_AS(polys::jacobi_norm(outside, 2), Error);

  try {
    polys::jacobi_norm(JacobiParams{0.5, -1.2, 0}, 0);
    FAIL("no throw");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::invalid_parameter);
  }
}

TEST_CASE("Jacobi orthonormality", "[polys]") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto jp = random_params(rng);
    const int top = std::min(jp.n_max, 3);
    for (int k = 0; k <= top; ++k)
      for (int l = k; l <= top; ++l) {
        const double v =
            polys::jacobi_norm(jp, k) * polys::jacobi_norm(jp, l) *
            weighted_integral(jp.mu, jp.nu, [&](double y) {
              return polys::detail::jacobi_all(jp.mu, jp.nu, l, y)[std::size_t(k)] *
                     polys::detail::jacobi_all(jp.mu, jp.nu, l, y)[std::size_t(l)];
            });
        CHECK_THAT(v, WithinAbs(k == l ? 1.0 : 0.0, 1e-8));
      }
  }
}

TEST_CASE("jacobi_y_overlap", "[polys]") {
  const auto t = polys::jacobi_y_overlap(JacobiParams{0.5, -9.5, 3});
  CHECK_THAT(t.diag[0], WithinRel(10.0 / 7.0, 1e-14));

  const auto sym = polys::jacobi_y_overlap(JacobiParams{-0.75, -0.75, 0});
  CHECK(sym.diag[0] == 0.0);
  for (int n = 1; n < 5; ++n)
    CHECK(polys::jacobi_q(-5.5, -5.5, n) == 0.0);

  // Matrix elements of y need one more power of decay than the norms.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> umu(0.3, 3.0), udelta(2.0, 4.0);
  for (int trial = 0; trial < 30; ++trial) {
    JacobiParams jp;
    jp.mu = umu(rng);
    jp.n_max = 3;
    jp.nu = -jp.mu - 2 * jp.n_max - 1 - udelta(rng);
    const auto m = polys::jacobi_y_overlap(jp);
    for (int k = 0; k <= 2; ++k)
      for (int l = k; l <= std::min(k + 1, 2); ++l) {
        const double v =
            polys::jacobi_norm(jp, k) * polys::jacobi_norm(jp, l) *
            weighted_integral(jp.mu, jp.nu, [&](double y) {
              const auto p = polys::detail::jacobi_all(jp.mu, jp.nu, l, y);
              return y * p[std::size_t(k)] * p[std::size_t(l)];
            });
        const double ref = k == l ? m.diag[std::size_t(k)] : m.sub[std::size_t(k)];
        CHECK_THAT(v, WithinAbs(ref, 1e-8 * std::max(1.0, std::abs(ref))));
      }
  }
}

TEST_CASE("laguerre_eval", "[polys]") {
  CHECK(polys::laguerre_eval(0.3, 0, 5.0) == 1.0);
  CHECK_THAT(polys::laguerre_eval(0.3, 1, 5.0), WithinAbs(1 + 0.3 - 5.0, 1e-15));
  CHECK_THAT(polys::laguerre_eval(1.0, 4, 2.5),
             WithinAbs(laguerre_explicit(1.0, 4, 2.5), 1e-13));
  CHECK_THROWS_AS(polys::laguerre_eval(-1.0, 2, 1.0), Error);
  CHECK_THROWS_AS(polys::laguerre_eval(0.5, -1, 1.0), Error);

  std::mt19937 rng(13);
  std::uniform_real_distribution<double> ug(-0.9, 5.0), uy(0.0, 20.0);
  std::uniform_int_distribution<int> un(0, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const double g = ug(rng), y = uy(rng);
    const int n = un(rng);
    double mag = 0.0;
    const double ref = laguerre_explicit(g, n, y, &mag);
    CHECK_THAT(polys::laguerre_eval(g, n, y),
               WithinAbs(ref, 1e-12 * std::max(1.0, mag)));
  }
}

TEST_CASE("Laguerre ODE residual", "[polys]") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ug(-0.9, 5.0), uy(0.1, 15.0);
  std::uniform_int_distribution<int> un(0, 8);
  const double h = 1e-3;
  for (int trial = 0; trial < 100; ++trial) {
    const double g = ug(rng), y = uy(rng);
    const int n = un(rng);
    auto L = [&](double x) { return polys::laguerre_eval(g, n, x); };
    const double l0 = L(y);
    const auto [d1, d2] = derivs(L, y, h);
    const double r = y * d2 + (g + 1 - y) * d1 + n * l0;
    const double scale =
        std::max({1.0, std::abs(l0), std::abs(y * d2), std::abs(n * l0)});
    CHECK(std::abs(r) < 1e-6 * scale);
  }
}

TEST_CASE("Laguerre orthonormality", "[polys]") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> ug(-0.9, 5.0);
  std::uniform_int_distribution<int> un(0, 4);
  boost::math::quadrature::exp_sinh<double> integrator;
  for (int trial = 0; trial < 100; ++trial) {
    const double g = ug(rng);
    const int top = un(rng);
    for (int k = 0; k <= top; ++k)
      for (int l = k; l <= top; ++l) {
        auto f = [&](double t) {
          const double v = std::pow(t, g) * std::exp(-t) * polys::laguerre_eval(g, k, t) *
                           polys::laguerre_eval(g, l, t);
          return std::isfinite(v) ? v : 0.0;
        };
        const double norm2 = std::exp(std::lgamma(k + g + 1) - std::lgamma(k + 1.0) +
                                      std::lgamma(l + g + 1) - std::lgamma(l + 1.0));
        const double v =
            integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13) /
            std::sqrt(norm2);
        CHECK_THAT(v, WithinAbs(k == l ? 1.0 : 0.0, 1e-8));
      }
  }
}

TEST_CASE("laguerre_y_matrix", "[polys]") {
  const auto t0 = polys::laguerre_y_matrix(1.0, 0);
  REQUIRE(t0.size() == 1);
  CHECK(t0.diag[0] == 2.0);

  const auto t = polys::laguerre_y_matrix(1.0, 2);
  CHECK(t.diag == std::vector<double>{2, 4, 6});
  CHECK_THAT(t.sub[0], WithinAbs(-std::sqrt(2.0), 1e-15));
  CHECK_THAT(t.sub[1], WithinAbs(-std::sqrt(6.0), 1e-15));

  // Eigenvalues are the zeros of L_3^1.
  for (double e : linalg::eigh_tridiag(t).values)
    CHECK(std::abs(polys::laguerre_eval(1.0, 3, e)) < 1e-12);

  const auto big = linalg::eigh_tridiag(polys::laguerre_y_matrix(0.5, 199));
  CHECK(big.values.front() > 0);
}

TEST_CASE("Gauss quadrature exactness", "[polys]") {
  // sum_i Lambda_{0i}^2 e_i^k = Gamma(gamma+k+1)/Gamma(gamma+1), k <= 2N-1
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> ug(-0.9, 5.0);
  std::uniform_int_distribution<int> un(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const double g = ug(rng);
    const int size = un(rng);
    const auto r = linalg::eigh_tridiag(polys::laguerre_y_matrix(g, size - 1), true);
    for (int k = 0; k <= 2 * size - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < size; ++i) {
        const double w = (*r.vectors)(0, std::size_t(i));
        s += w * w * std::pow(r.values[std::size_t(i)], k);
      }
      const double ref = std::exp(std::lgamma(g + k + 1) - std::lgamma(g + 1));
      CHECK_THAT(s, WithinRel(ref, 1e-9));
    }
  }
}

TEST_CASE("hbar_eval", "[polys]") {
  const HbarParams hp{0.8, -12.3, 1.7, -0.25};
  const auto xi = polys::hbar_eval(hp, 4);
  CHECK(xi[0] == 1.0);
  // n = 0 relation with xi_{-1} = 0
  const polys::EllRule rule{hp.mu, hp.nu, hp.ell};
  const double expect1 = (rule(0) * (-hp.inv_arg) + polys::jacobi_q(hp.mu, hp.nu, 0)) /
                         polys::jacobi_upper(hp.mu, hp.nu, 0);
  CHECK_THAT(xi[1], WithinRel(expect1, 1e-14));
  CHECK_THAT(rule(0), WithinRel(std::pow(0.5 * (hp.mu + hp.nu + 1), 2) + hp.ell, 1e-14));

  // F -> infinity: the recursion of P_n at y = 0.
  const HbarParams big{0.8, -12.3, 1.7, -1e-8};
  const auto xb = polys::hbar_eval(big, 4);
  const auto p0 = polys::detail::jacobi_all(big.mu, big.nu, 4, 0.0);
  for (std::size_t n = 0; n < xb.size(); ++n)
    CHECK_THAT(xb[n], WithinAbs(p0[n], 1e-6 * std::max(1.0, std::abs(p0[n]))));

  HbarParams diag = hp;
  diag.inv_arg = -std::numeric_limits<double>::infinity();
  try {
    polys::hbar_eval(diag, 3);
    FAIL("no throw");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::wrong_branch);
  }
}
