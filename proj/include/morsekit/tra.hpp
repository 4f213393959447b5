#pragma once
// Tridiagonal representation of the wave operator in the finite Jacobi basis
//   phi_n(y) = A_n (y-1)^{mu/2} (y+1)^{(nu+1)/2} P_n^{(mu,nu)}(y),
//   y = (2/q) e^{lambda x} + 1,
// with the energy fixing mu = 2 sqrt(-2E)/lambda.
#include "morsekit/error.hpp"
#include "morsekit/polys.hpp"
#include "morsekit/potential.hpp"
#include "morsekit/spectrum.hpp"
#include "morsekit/sym_tridiag.hpp"
#include "morsekit/wavefunction.hpp"
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace morsekit {

//! Expansion coefficients f_n of a TRA wavefunction at `energy`.
struct TraCoeffs {
  std::vector<double> f;
  double energy = 0.0;
  bool unstable = false; // recursion grew beyond 1e12 relative to f_0
};

namespace tra {

//! Guard on the strict inequality N < -(mu+nu+1)/2.
inline constexpr double basis_guard = 1e-9;

//! Largest admissible basis index; -1 when the basis is empty.
inline int n_max_effective(double mu, double nu) {
  return int(std::floor(-(mu + nu + 1) / 2 - basis_guard));
}

//! Sets mu = 2 sqrt(-2E)/lambda and ell for a bound-state energy E < 0.
inline UParams complete_uparams(UParams u, double E, double lambda) {
  if (!(E < 0))
    throw Error(Errc::domain, "complete_uparams: energy must be negative");
  const double mu = 2 * std::sqrt(-2 * E) / lambda;
  const double s = 0.5 * (mu + u.nu + 1);
  u.mu = mu;
  u.ell = 0.5 * (mu + 1) * (u.nu + 1) - s * s - u.D;
  return u;
}

struct TraBasisState {
  UParams uparams; // completed
  int n_max_effective = -1;

  JacobiParams jacobi() const {
    return {*uparams.mu, uparams.nu, n_max_effective};
  }
  int size() const { return n_max_effective + 1; }
};

inline TraBasisState basis_state(const PotentialParams &p, double E) {
  TraBasisState st;
  st.uparams = complete_uparams(potential::to_uparams(p), E, p.lambda);
  st.n_max_effective = n_max_effective(*st.uparams.mu, st.uparams.nu);
  return st;
}

inline double require_mu(const UParams &u) {
  if (!u.mu)
    throw Error(Errc::contract, "TRA: UParams has no energy (mu unset)");
  return *u.mu;
}

//! a_n = n(n+mu+nu+1) + (mu+1)(nu+1)/2 - D.
inline double a_n_coeff(const UParams &u, int n) {
  const double mu = require_mu(u);
  return n * (n + mu + u.nu + 1) + 0.5 * (mu + 1) * (u.nu + 1) - u.D;
}

//! -(2/lambda^2) <m|(H-E)|n> on the first `size` basis functions:
//! diagonal a_n + F Q_n, off-diagonal -F S_n.
inline SymTridiag wave_operator_matrix(const UParams &u, int size) {
  const double mu = require_mu(u);
  if (size < 1)
    throw Error(Errc::basis_exhausted, "wave_operator_matrix: empty basis");
  std::vector<double> d(static_cast<std::size_t>(size)), s(static_cast<std::size_t>(size - 1));
  for (int n = 0; n < size; ++n)
    d[std::size_t(n)] = a_n_coeff(u, n) + u.F * polys::jacobi_q(mu, u.nu, n);
  for (int n = 0; n + 1 < size; ++n)
    s[std::size_t(n)] = -u.F * polys::jacobi_s(mu, u.nu, n);
  return {std::move(d), std::move(s)};
}

namespace detail {

// log of (y-1)^{mu/2} (y+1)^{(nu+1)/2} given y-1 directly.
inline double log_envelope(double mu, double nu, double ym1) {
  return 0.5 * mu * std::log(ym1) + 0.5 * (nu + 1) * std::log(ym1 + 2);
}

} // namespace detail

//! phi_n(y). Returns 0 at y = 1 for mu > 0.
inline double basis_eval(const UParams &u, int n, double y) {
  const double mu = require_mu(u);
  const int nmax = n_max_effective(mu, u.nu);
  if (n < 0 || n > nmax)
    throw Error(Errc::domain, "basis_eval: index beyond the finite basis");
  if (!(y >= 1))
    throw Error(Errc::domain, "basis_eval: y must be >= 1");
  if (y == 1.0)
    return 0.0; // mu > 0 for every bound-state energy
  const JacobiParams jp{mu, u.nu, nmax};
  return polys::jacobi_norm(jp, n) *
         std::exp(detail::log_envelope(mu, u.nu, y - 1)) *
         polys::jacobi_eval(jp, n, y);
}

//! Bound states of the C = 0 branch, where the wave operator is diagonal:
//!   2E_n/lambda^2 = -mu_n^2/4,
//!   mu_n = [D + (nu^2-1)/4]/[n + (nu+1)/2] - [n + (nu+1)/2].
//! Level n is kept when mu_n > 0 and mu_n + nu + 2n + 1 < 0, i.e. when the
//! closed-form eigenfunction is square integrable at both ends.
inline Spectrum diag_spectrum(const PotentialParams &p) {
  if (p.C != 0)
    throw Error(Errc::wrong_branch,
                "diag_spectrum: requires C = 0 (use nhd, pps or fdm)");
  const UParams u = potential::to_uparams(p);
  const double k = u.D + 0.25 * (u.nu * u.nu - 1);
  Spectrum sp;
  sp.method = Method::diag;
  sp.params = p;
  sp.diagnostic_name = "mu_n";
  for (int n = 0; n + 0.5 * (u.nu + 1) < 0; ++n) {
    const double m = n + 0.5 * (u.nu + 1);
    const double mu_n = k / m - m;
    if (!(mu_n > 0) || !(mu_n + u.nu + 2 * n + 1 < 0))
      continue;
    Level l;
    l.energy = -p.lambda * p.lambda * mu_n * mu_n / 8;
    l.diagnostic = mu_n;
    sp.levels.push_back(l);
  }
  std::sort(sp.levels.begin(), sp.levels.end(),
            [](const Level &a, const Level &b) { return a.energy < b.energy; });
  for (std::size_t i = 0; i < sp.levels.size(); ++i)
    sp.levels[i].index = int(i);
  return sp;
}

//! psi(x) = sum_n f_n phi_n(y(x)) on xs, normalized by the trapezoidal rule on
//! xs and sign-fixed so the first lobe is positive.
inline std::vector<double> assemble_wavefunction(const UParams &u,
                                                 const TraCoeffs &coeffs,
                                                 const PotentialParams &p,
                                                 std::span<const double> xs) {
  const double mu = require_mu(u);
  const int nmax = n_max_effective(mu, u.nu);
  const int nf = int(coeffs.f.size());
  if (nf < 1 || nf > nmax + 1)
    throw Error(Errc::contract,
                "assemble_wavefunction: coefficient count does not fit the basis");
  const JacobiParams jp{mu, u.nu, nmax};
  std::vector<double> weight(static_cast<std::size_t>(nf));
  for (int n = 0; n < nf; ++n)
    weight[std::size_t(n)] = coeffs.f[std::size_t(n)] * polys::jacobi_norm(jp, n);

  std::vector<double> psi(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ym1 = (2 / p.q) * std::exp(p.lambda * xs[i]);
    if (ym1 == 0.0) {
      psi[i] = 0.0;
      continue;
    }
    const auto pn = polys::detail::jacobi_all(mu, u.nu, nf - 1, ym1 + 1);
    double sum = 0.0;
    for (int n = 0; n < nf; ++n)
      sum += weight[std::size_t(n)] * pn[std::size_t(n)];
    psi[i] = sum * std::exp(detail::log_envelope(mu, u.nu, ym1));
  }
  wavefunction::normalize(xs, psi);
  return psi;
}

} // namespace tra
} // namespace morsekit
