#pragma once
// Hamiltonian diagonalization in the Laguerre basis
//   phi_n(x) ~ y^{(gamma+1)/2} e^{-y/2} L_n^gamma(y),  y = rho e^{lambda x/2}.
// The kinetic term plus C e^{lambda x} is exactly tridiagonal there; the rest
// of the potential is short range and goes through Gauss quadrature.
#include "morsekit/error.hpp"
#include "morsekit/linalg.hpp"
#include "morsekit/parallel.hpp"
#include "morsekit/polys.hpp"
#include "morsekit/potential.hpp"
#include "morsekit/spectrum.hpp"
#include "morsekit/sym_tridiag.hpp"
#include "morsekit/wavefunction.hpp"
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace morsekit {

struct NhdConfig {
  int basis_size = 200;
  double gamma = 2.0;
};

struct QuadratureRule {
  std::vector<double> nodes; // ascending
  DenseMatrix transform;     // columns are the normalized eigenvectors
};

struct PlateauRow {
  double gamma = 0.0;
  Spectrum spectrum;
  double score = std::numeric_limits<double>::infinity();
};

struct PlateauScan {
  std::vector<PlateauRow> rows;
  std::size_t recommended = 0; // index into rows
};

namespace nhd {

//! Levels at or above this are not counted as bound.
inline constexpr double bound_threshold = -1e-10;
//! Relative shift between sizes N and 3N/4 above which a level is flagged.
inline constexpr double near_threshold_shift = 1e-4;
//! Levels with |E| below this fraction of |E_0| are flagged as well.
inline constexpr double near_threshold_depth = 1e-2;

inline void validate(const NhdConfig &cfg) {
  if (cfg.basis_size < 2)
    throw Error(Errc::domain, "nhd: basis_size must be at least 2");
  if (!(cfg.gamma > -1))
    throw Error(Errc::domain, "nhd: gamma must exceed -1");
}

inline double rho(double C, double lambda) {
  if (!(C > 0))
    throw Error(Errc::wrong_branch,
                "nhd: requires C > 0 (use diag or fdm for C = 0)");
  return 4 * std::sqrt(2 * C) / lambda;
}

//! H0 = -(1/2) d^2/dx^2 + C e^{lambda x} in the Laguerre basis.
inline SymTridiag h0_matrix(const NhdConfig &cfg, double lambda) {
  validate(cfg);
  const double g = cfg.gamma, s = lambda * lambda / 16;
  const int n = cfg.basis_size;
  std::vector<double> d(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(n - 1));
  for (int k = 0; k < n; ++k) {
    const double a = 2 * k + g + 1;
    d[std::size_t(k)] = s * (a * a - 0.5 * (g * g - 1));
  }
  for (int k = 1; k < n; ++k)
    e[std::size_t(k - 1)] = -s * (2 * k + g) * std::sqrt(k * (k + g));
  return {std::move(d), std::move(e)};
}

inline QuadratureRule quadrature_rule(const NhdConfig &cfg) {
  if (cfg.basis_size < 1 || !(cfg.gamma > -1))
    throw Error(Errc::domain, "quadrature_rule: need basis_size >= 1, gamma > -1");
  auto r = linalg::eigh_tridiag(
      polys::laguerre_y_matrix(cfg.gamma, cfg.basis_size - 1), true);
  return {std::move(r.values), std::move(*r.vectors)};
}

namespace detail {

// Short-range part of V at e^{lambda x} = t.
inline double short_range(const PotentialParams &p, double t) {
  const double u = t + p.q;
  return p.A / (u * u) + p.B / u - (p.A + p.q * p.B) / (p.q * p.q);
}

} // namespace detail

//! U = Lambda diag(U(x_i)) Lambda^T with e^{lambda x_i} = (e_i/rho)^2.
inline DenseMatrix uq_matrix(const PotentialParams &p,
                             const QuadratureRule &rule) {
  const double r = rho(p.C, p.lambda);
  const std::size_t n = rule.nodes.size();
  std::vector<double> dv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = rule.nodes[i] / r;
    dv[i] = detail::short_range(p, t * t);
  }
  DenseMatrix u(n);
  const DenseMatrix &L = rule.transform;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += L(i, k) * dv[k] * L(j, k);
      u(i, j) = s;
      u(j, i) = s;
    }
  return u;
}

inline DenseMatrix uq_matrix(const PotentialParams &p, const NhdConfig &cfg) {
  potential::validate(p);
  validate(cfg);
  rho(p.C, p.lambda);
  return uq_matrix(p, quadrature_rule(cfg));
}

//! H0 + U as a dense matrix.
inline DenseMatrix hamiltonian(const PotentialParams &p, const NhdConfig &cfg) {
  DenseMatrix h = uq_matrix(p, cfg);
  const SymTridiag h0 = h0_matrix(cfg, p.lambda);
  for (std::size_t i = 0; i < h0.size(); ++i) {
    h(i, i) += h0.diag[i];
    if (i + 1 < h0.size()) {
      h(i, i + 1) += h0.sub[i];
      h(i + 1, i) += h0.sub[i];
    }
  }
  return h;
}

//! All eigenvalues of H0 + U, ascending.
inline std::vector<double> hamiltonian_eigenvalues(const PotentialParams &p,
                                                   const NhdConfig &cfg) {
  return linalg::eigh_dense(hamiltonian(p, cfg)).values;
}

namespace detail {

inline Spectrum bound_levels(const PotentialParams &p, const NhdConfig &cfg,
                             const std::vector<double> &values) {
  Spectrum sp;
  sp.method = Method::nhd;
  sp.params = p;
  sp.diagnostic_name = "gamma";
  for (double v : values) {
    if (!(v < bound_threshold))
      break;
    Level l;
    l.index = int(sp.levels.size());
    l.energy = v;
    l.diagnostic = cfg.gamma;
    sp.levels.push_back(l);
  }
  return sp;
}

} // namespace detail

//! Bound states: eigenvalues of H0 + U below -1e-10. Each level carries the
//! shift against a basis of 3/4 the size as its uncertainty.
inline Spectrum nhd_spectrum(const PotentialParams &p, const NhdConfig &cfg) {
  potential::validate(p);
  validate(cfg);
  Spectrum sp = detail::bound_levels(p, cfg, hamiltonian_eigenvalues(p, cfg));
  const int small = std::max(2, 3 * cfg.basis_size / 4);
  if (small < cfg.basis_size) {
    NhdConfig c2 = cfg;
    c2.basis_size = small;
    const auto coarse = hamiltonian_eigenvalues(p, c2);
    for (auto &l : sp.levels) {
      const std::size_t i = std::size_t(l.index);
      // A level with no partner below threshold in the coarse basis is as
      // unconverged as it gets.
      l.uncertainty = i < coarse.size() ? std::abs(coarse[i] - l.energy)
                                        : std::numeric_limits<double>::infinity();
      l.near_threshold =
          !(l.uncertainty <= near_threshold_shift * std::abs(l.energy));
    }
  }
  for (auto &l : sp.levels)
    if (std::abs(l.energy) < near_threshold_depth * std::abs(sp.levels[0].energy))
      l.near_threshold = true;
  return sp;
}

//! phi_0..phi_{size-1} at x: sqrt(lambda/2) y^{(gamma+1)/2} e^{-y/2} times the
//! orthonormal Laguerre polynomials, y = rho e^{lambda x/2}.
inline std::vector<double> basis_values(const PotentialParams &p,
                                        const NhdConfig &cfg, double x) {
  const double g = cfg.gamma;
  const double y = rho(p.C, p.lambda) * std::exp(0.5 * p.lambda * x);
  const std::size_t n = static_cast<std::size_t>(cfg.basis_size);
  std::vector<double> l(n, 0.0);
  const double log_pref = 0.5 * std::log(0.5 * p.lambda) +
                          0.5 * (g + 1) * std::log(y) - 0.5 * y -
                          0.5 * std::lgamma(g + 1);
  if (!(log_pref > -700))
    return l;
  l[0] = 1.0;
  if (n > 1)
    l[1] = (g + 1 - y) / std::sqrt(g + 1);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double kk = double(k);
    l[k + 1] = ((2 * kk + g + 1 - y) * l[k] -
                std::sqrt(kk * (kk + g)) * l[k - 1]) /
               std::sqrt((kk + 1) * (kk + 1 + g));
  }
  const double pref = std::exp(log_pref);
  for (double &v : l)
    v *= pref;
  return l;
}

//! Eigenvector of H0 + U for `level` expanded on xs, normalized on xs.
inline std::vector<double> nhd_wavefunction(const PotentialParams &p,
                                            const NhdConfig &cfg, int level,
                                            std::span<const double> xs) {
  potential::validate(p);
  validate(cfg);
  const auto eig = linalg::eigh_dense(hamiltonian(p, cfg), true);
  std::size_t bound = 0;
  while (bound < eig.values.size() && eig.values[bound] < bound_threshold)
    ++bound;
  if (level < 0 || std::size_t(level) >= bound)
    throw Error(Errc::domain, "nhd_wavefunction: level " +
                                  std::to_string(level) + " out of range, " +
                                  std::to_string(bound) + " available");
  const auto c = eig.vectors->column(std::size_t(level));
  std::vector<double> psi(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto phi = basis_values(p, cfg, xs[i]);
    double s = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k)
      s += c[k] * phi[k];
    psi[i] = s;
  }
  wavefunction::normalize(xs, psi);
  return psi;
}

//! Spectra over a set of gammas with a stability score per gamma: the largest
//! change of any common level between its neighbours (one-sided at the ends).
inline PlateauScan plateau_scan(const PotentialParams &p, int size,
                                const std::vector<double> &gammas) {
  if (gammas.size() < 3)
    throw Error(Errc::insufficient_data, "plateau_scan: need at least 3 gammas");
  potential::validate(p);
  rho(p.C, p.lambda);
  PlateauScan out;
  out.rows.resize(gammas.size());
  parallel_for(gammas.size(), [&](std::size_t i) {
    NhdConfig cfg{size, gammas[i]};
    validate(cfg);
    out.rows[i].gamma = gammas[i];
    out.rows[i].spectrum =
        detail::bound_levels(p, cfg, hamiltonian_eigenvalues(p, cfg));
  });
  const std::size_t m = gammas.size();
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == m ? i : i + 1;
    const auto &a = out.rows[lo].spectrum.levels;
    const auto &b = out.rows[hi].spectrum.levels;
    const std::size_t common = std::min(a.size(), b.size());
    double score = 0.0;
    for (std::size_t k = 0; k < common; ++k)
      score = std::max(score, std::abs(a[k].energy - b[k].energy));
    out.rows[i].score = score;
  }
  for (std::size_t i = 1; i < m; ++i)
    if (out.rows[i].score < out.rows[out.recommended].score)
      out.recommended = i;
  return out;
}

//! gamma in {0.5, 1.0, ..., 4.0}, spectrum at the recommended value.
inline Spectrum nhd_spectrum_auto(const PotentialParams &p, int size = 200) {
  std::vector<double> gammas;
  for (int k = 1; k <= 8; ++k)
    gammas.push_back(0.5 * k);
  const auto scan = plateau_scan(p, size, gammas);
  return nhd_spectrum(p, NhdConfig{size, scan.rows[scan.recommended].gamma});
}

} // namespace nhd
} // namespace morsekit
