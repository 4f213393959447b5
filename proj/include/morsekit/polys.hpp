#pragma once
// Finite Jacobi polynomials on [1, inf), associated Laguerre polynomials and
// the recursion-defined H-bar family carrying the TRA expansion coefficients.
#include "morsekit/error.hpp"
#include "morsekit/sym_tridiag.hpp"
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace morsekit {

//! Basis parameters of the finite Jacobi family. Polynomials up to degree
//! n_max are square integrable against (y-1)^mu (y+1)^nu on [1, inf) when
//! mu > -1 and mu + nu < -2 n_max - 1.
struct JacobiParams {
  double mu = 0.0;
  double nu = 0.0;
  int n_max = 0;
};

//! Parameters of the H-bar polynomial H_n^{(mu,nu)}(z^{-1}; ell, theta).
//! `inv_arg` is z^{-1} = -1/F. theta is always pi/2 in this library.
struct HbarParams {
  double mu = 0.0;
  double nu = 0.0;
  double ell = 0.0;
  double inv_arg = 0.0;
  static constexpr double theta = std::numbers::pi / 2;
};

namespace polys {

inline constexpr double singular_tol = 1e-12;

namespace detail {

inline double checked_den(double den, const char *what) {
  if (std::abs(den) < singular_tol)
    throw Error(Errc::singular_parameter,
                std::string(what) + ": vanishing recursion denominator");
  return den;
}

} // namespace detail

//! Q_n: minus the diagonal of the normalized y-matrix.
inline double jacobi_q(double mu, double nu, int n) {
  if (n == 0)
    return (mu - nu) / detail::checked_den(mu + nu + 2, "jacobi_q");
  const double s = 2 * n + mu + nu;
  return (mu * mu - nu * nu) / detail::checked_den(s * (s + 2), "jacobi_q");
}

//! S_n: off-diagonal of the normalized y-matrix, coupling n and n+1.
inline double jacobi_s(double mu, double nu, int n) {
  const double s = 2 * n + mu + nu;
  const double num = (n + 1) * (n + mu + 1) * (n + nu + 1);
  // (n+mu+nu+1)/(2n+mu+nu+1) is exactly 1 at n = 0.
  const double ratio =
      n == 0 ? 1.0
             : (n + mu + nu + 1) / detail::checked_den(s + 1, "jacobi_s");
  const double arg = num * ratio / detail::checked_den(s + 3, "jacobi_s");
  if (arg < 0)
    throw Error(Errc::invalid_parameter,
                "jacobi_s: negative radicand, parameters outside the "
                "admissible region");
  return 2.0 / detail::checked_den(s + 2, "jacobi_s") * std::sqrt(arg);
}

//! Coefficient of P_{n-1} in (y + Q_n) P_n = lower P_{n-1} + upper P_{n+1}.
inline double jacobi_lower(double mu, double nu, int n) {
  const double s = 2 * n + mu + nu;
  return 2 * (n + mu) * (n + nu) /
         detail::checked_den(s * (s + 1), "jacobi_lower");
}

//! Coefficient of P_{n+1} in the same relation.
inline double jacobi_upper(double mu, double nu, int n) {
  if (n == 0)
    return 2.0 / detail::checked_den(mu + nu + 2, "jacobi_upper");
  const double s = 2 * n + mu + nu;
  return 2 * (n + 1) * (n + mu + nu + 1) /
         detail::checked_den((s + 1) * (s + 2), "jacobi_upper");
}

namespace detail {

// Upward three-term recursion at any real x, no domain checks.
inline std::vector<double> jacobi_all(double mu, double nu, int n, double x) {
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  p[0] = 1.0;
  if (n == 0)
    return p;
  p[1] = 0.5 * ((mu + nu + 2) * x + mu - nu);
  for (int k = 1; k < n; ++k)
    p[k + 1] = ((x + jacobi_q(mu, nu, k)) * p[k] -
                jacobi_lower(mu, nu, k) * p[k - 1]) /
               jacobi_upper(mu, nu, k);
  return p;
}

} // namespace detail

//! P_n^{(mu,nu)}(y) by upward recursion from P_{-1} = 0, P_0 = 1.
inline double jacobi_eval(const JacobiParams &p, int n, double y) {
  if (n < 0 || n > p.n_max)
    throw Error(Errc::domain, "jacobi_eval: degree outside [0, n_max]");
  if (!(y >= 1.0))
    throw Error(Errc::domain, "jacobi_eval: y must be >= 1");
  return detail::jacobi_all(p.mu, p.nu, n, y)[std::size_t(n)];
}

//! Normalization A_k with A_k^{-2} = int_1^inf (x-1)^mu (x+1)^nu P_k^2 dx:
//!   A_k^2 = -(2k+s) k! Gamma(-k-nu) / (2^s Gamma(k+mu+1) Gamma(1-k-s)),
//! s = mu+nu+1, evaluated in logs.
inline double jacobi_norm(const JacobiParams &p, int k) {
  if (k < 0 || k > p.n_max)
    throw Error(Errc::domain, "jacobi_norm: index outside [0, n_max]");
  const double s = p.mu + p.nu + 1;
  const double lead = -(2 * k + s);
  const double g_nu = -k - p.nu;
  const double g_mu = k + p.mu + 1;
  const double g_s = 1 - k - s;
  if (!(lead > 0 && g_nu > 0 && g_mu > 0 && g_s > 0))
    throw Error(Errc::invalid_parameter,
                "jacobi_norm: (mu, nu, k) outside the square-integrable region");
  const double log_a2 = std::log(lead) + std::lgamma(k + 1.0) +
                        std::lgamma(g_nu) - s * std::numbers::ln2 -
                        std::lgamma(g_mu) - std::lgamma(g_s);
  return std::exp(0.5 * log_a2);
}

//! Matrix of y in the normalized Jacobi basis: diagonal -Q_n, off-diagonal S_n.
inline SymTridiag jacobi_y_overlap(const JacobiParams &p) {
  const int n = p.n_max + 1;
  std::vector<double> d(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n - 1));
  for (int k = 0; k < n; ++k)
    d[std::size_t(k)] = -jacobi_q(p.mu, p.nu, k);
  for (int k = 0; k + 1 < n; ++k)
    s[std::size_t(k)] = jacobi_s(p.mu, p.nu, k);
  return {std::move(d), std::move(s)};
}

//! L_n^gamma(y) by the standard three-term recursion.
inline double laguerre_eval(double gamma, int n, double y) {
  if (n < 0)
    throw Error(Errc::domain, "laguerre_eval: negative degree");
  if (!(gamma > -1))
    throw Error(Errc::domain, "laguerre_eval: gamma must exceed -1");
  double prev = 0.0, cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = ((2 * k + 1 + gamma - y) * cur - (k + gamma) * prev) /
                        (k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

//! Jacobi matrix of y for the orthonormal Laguerre family: diagonal
//! 2n+gamma+1, off-diagonal -sqrt((n+1)(n+1+gamma)). Stored off-diagonals are
//! negative.
inline SymTridiag laguerre_y_matrix(double gamma, int n_max) {
  if (!(gamma > -1) || n_max < 0)
    throw Error(Errc::domain, "laguerre_y_matrix: need gamma > -1, n_max >= 0");
  std::vector<double> d(static_cast<std::size_t>(n_max) + 1), s(static_cast<std::size_t>(n_max));
  for (int n = 0; n <= n_max; ++n)
    d[std::size_t(n)] = 2 * n + gamma + 1;
  for (int n = 0; n < n_max; ++n)
    s[std::size_t(n)] = -std::sqrt((n + 1.0) * (n + 1.0 + gamma));
  return {std::move(d), std::move(s)};
}

//! a_n = (n + (mu+nu+1)/2)^2 + ell, the diagonal rule of the TRA wave operator.
struct EllRule {
  double mu, nu, ell;
  double operator()(int n) const {
    const double c = n + 0.5 * (mu + nu + 1);
    return c * c + ell;
  }
};

//! xi_0..xi_{n_max} of H-bar_n(-1/F; ell, pi/2) by upward recursion:
//!   (a_n/F + Q_n) xi_n = lower_n xi_{n-1} + upper_n xi_{n+1},  xi_0 = 1.
template <class ARule>
std::vector<double> hbar_eval(const HbarParams &hp, ARule &&a_fn, int n_max) {
  if (n_max < 0)
    throw Error(Errc::domain, "hbar_eval: negative n_max");
  if (!std::isfinite(hp.inv_arg))
    throw Error(Errc::wrong_branch,
                "hbar_eval: F = 0 is the diagonal branch (closed-form spectrum)");
  const double inv_f = -hp.inv_arg;
  std::vector<double> xi(static_cast<std::size_t>(n_max) + 1);
  xi[0] = 1.0;
  for (int n = 0; n < n_max; ++n) {
    double rhs = (a_fn(n) * inv_f + jacobi_q(hp.mu, hp.nu, n)) * xi[std::size_t(n)];
    if (n > 0)
      rhs -= jacobi_lower(hp.mu, hp.nu, n) * xi[std::size_t(n - 1)];
    xi[std::size_t(n + 1)] = rhs / jacobi_upper(hp.mu, hp.nu, n);
  }
  return xi;
}

inline std::vector<double> hbar_eval(const HbarParams &hp, int n_max) {
  return hbar_eval(hp, EllRule{hp.mu, hp.nu, hp.ell}, n_max);
}

} // namespace polys
} // namespace morsekit
