#pragma once
// Finite-difference oracle: -psi''/2 + V psi = E psi with Dirichlet ends,
// three-point stencil on a uniform interior grid.
#include "morsekit/error.hpp"
#include "morsekit/linalg.hpp"
#include "morsekit/potential.hpp"
#include "morsekit/spectrum.hpp"
#include "morsekit/sym_tridiag.hpp"
#include "morsekit/wavefunction.hpp"
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace morsekit {

struct FdmConfig {
  double x_min = -30.0;
  double x_max = 8.0;
  int n_points = 8000;
  bool richardson = false;
  bool auto_widen = true;
};

struct FdmState {
  std::vector<double> x;
  std::vector<double> psi;
  double energy = 0.0;
};

namespace fdm {

//! Decay exponent demanded of every classically forbidden tail.
inline constexpr double tail_exponent = 18.0;
//! |V(x_min)| bound.
inline constexpr double left_flatness = 1e-8;
inline constexpr int max_points = 4'000'000;

inline void validate(const FdmConfig &cfg) {
  if (!(cfg.x_min < cfg.x_max))
    throw Error(Errc::domain, "fdm: x_min must be below x_max");
  if (cfg.n_points < 100)
    throw Error(Errc::domain, "fdm: n_points must be at least 100");
}

inline double step(const FdmConfig &cfg) {
  return (cfg.x_max - cfg.x_min) / (cfg.n_points + 1);
}

//! Interior nodes x_i = x_min + i h, i = 1..n.
inline std::vector<double> grid(const FdmConfig &cfg) {
  const double h = step(cfg);
  std::vector<double> x(static_cast<std::size_t>(cfg.n_points));
  for (int i = 0; i < cfg.n_points; ++i)
    x[std::size_t(i)] = cfg.x_min + (i + 1) * h;
  return x;
}

//! The discretized Hamiltonian for any potential callable V(x).
template <class VFn>
SymTridiag hamiltonian(VFn &&v, const FdmConfig &cfg) {
  validate(cfg);
  const double h = step(cfg);
  const auto x = grid(cfg);
  std::vector<double> d(x.size()), s(x.size() - 1, -0.5 / (h * h));
  for (std::size_t i = 0; i < x.size(); ++i)
    d[i] = 1 / (h * h) + v(x[i]);
  return {std::move(d), std::move(s)};
}

//! The k lowest eigenvalues by Sturm bisection.
inline std::vector<double> lowest_eigenvalues(const SymTridiag &t, std::size_t k) {
  k = std::min(k, t.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double r = 0.0;
    if (i > 0)
      r += std::abs(t.sub[i - 1]);
    if (i + 1 < t.size())
      r += std::abs(t.sub[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  std::vector<double> out;
  for (std::size_t j = 0; j < k; ++j) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      if (linalg::sturm_count(t, mid) > j)
        b = mid;
      else
        a = mid;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

namespace detail {

template <class VFn>
std::vector<double> bound_energies(VFn &&v, const FdmConfig &cfg) {
  return linalg::eigvals_below(hamiltonian(v, cfg), 0.0);
}

// Integral of sqrt(2(V-E)) over the forbidden region next to each end,
// sampled at the grid step.
inline std::pair<double, double> tail_exponents(const PotentialParams &p,
                                                const FdmConfig &cfg, double e) {
  const double h = step(cfg);
  auto kappa = [&](double x) {
    return std::sqrt(2 * std::max(potential::eval_potential(p, x) - e, 0.0));
  };
  double left = 0.0, right = 0.0;
  for (double x = cfg.x_min; x < cfg.x_max; x += h) {
    const double k = kappa(x);
    if (k == 0.0)
      break;
    left += k * h;
  }
  for (double x = cfg.x_max; x > cfg.x_min; x -= h) {
    const double k = kappa(x);
    if (k == 0.0)
      break;
    right += k * h;
  }
  return {left, right};
}

} // namespace detail

//! Widens the box at fixed step until |V(x_min)| is negligible, the level
//! count is stable under one more doubling of the left margin, and the
//! highest level decays by e^{-18} in both forbidden tails.
inline FdmConfig widen(const PotentialParams &p, FdmConfig cfg) {
  validate(cfg);
  const double h = step(cfg);
  double anchor = 0.0;
  if (auto m = potential::global_minimum(p))
    anchor = std::clamp(m->x0, cfg.x_min, cfg.x_max);
  auto resize = [&](FdmConfig &c, double lo, double hi) {
    const double n = std::round((hi - lo) / h) - 1;
    if (n > max_points)
      throw Error(Errc::domain,
                  "fdm: auto-widen failed, the potential never confines the "
                  "highest level");
    c.x_min = lo;
    c.x_max = hi;
    c.n_points = int(n);
  };
  auto pot = [&](double x) { return potential::eval_potential(p, x); };
  auto grow_left = [&](FdmConfig c) {
    const double margin = std::max(anchor - c.x_min, 1.0);
    resize(c, anchor - 2 * margin, c.x_max);
    return c;
  };
  auto grow_right = [&](FdmConfig c) {
    const double margin = std::max(c.x_max - anchor, 1.0);
    resize(c, c.x_min, anchor + 2 * margin);
    return c;
  };

  while (std::abs(pot(cfg.x_min)) >= left_flatness)
    cfg = grow_left(cfg);

  auto levels = detail::bound_energies(pot, cfg);
  for (;;) {
    // Very shallow levels only show up once the box is wide enough.
    const FdmConfig wider = grow_left(cfg);
    const auto wider_levels = detail::bound_energies(pot, wider);
    if (wider_levels.size() != levels.size()) {
      cfg = wider;
      levels = wider_levels;
      continue;
    }
    if (levels.empty())
      return cfg;
    const auto [left, right] = detail::tail_exponents(p, cfg, levels.back());
    if (left >= tail_exponent && right >= tail_exponent)
      return cfg;
    if (left < tail_exponent)
      cfg = grow_left(cfg);
    if (right < tail_exponent)
      cfg = grow_right(cfg);
    levels = detail::bound_energies(pot, cfg);
  }
}

//! Negative eigenvalues of the discretized Hamiltonian. With Richardson on,
//! E = (4 E_{h/2} - E_h)/3 and the uncertainty is |E - E_{h/2}|.
inline Spectrum fdm_spectrum(const PotentialParams &p, const FdmConfig &cfg_in) {
  potential::validate(p);
  validate(cfg_in);
  const FdmConfig cfg = cfg_in.auto_widen ? widen(p, cfg_in) : cfg_in;
  auto pot = [&](double x) { return potential::eval_potential(p, x); };
  const auto coarse = detail::bound_energies(pot, cfg);

  Spectrum sp;
  sp.method = Method::fdm;
  sp.params = p;
  sp.diagnostic_name = "h";
  std::vector<double> fine;
  if (cfg.richardson) {
    FdmConfig half = cfg;
    half.n_points = 2 * cfg.n_points + 1;
    fine = detail::bound_energies(pot, half);
  }
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    Level l;
    l.index = int(i);
    l.energy = coarse[i];
    l.diagnostic = step(cfg);
    if (cfg.richardson && i < fine.size()) {
      l.energy = (4 * fine[i] - coarse[i]) / 3;
      l.uncertainty = std::abs(l.energy - fine[i]);
    }
    if (!(l.energy < 0))
      break;
    sp.levels.push_back(l);
  }
  return sp;
}

//! Eigenvector of level `level` by inverse iteration on the grid including
//! both Dirichlet end points, normalized there.
inline FdmState fdm_wavefunction(const PotentialParams &p, const FdmConfig &cfg_in,
                                 int level) {
  potential::validate(p);
  validate(cfg_in);
  const FdmConfig cfg = cfg_in.auto_widen ? widen(p, cfg_in) : cfg_in;
  auto pot = [&](double x) { return potential::eval_potential(p, x); };
  const SymTridiag t = hamiltonian(pot, cfg);
  const auto levels = linalg::eigvals_below(t, 0.0);
  if (level < 0 || std::size_t(level) >= levels.size())
    throw Error(Errc::domain, "fdm_wavefunction: level " + std::to_string(level) +
                                  " out of range, " +
                                  std::to_string(levels.size()) + " available");
  FdmState st;
  st.energy = levels[std::size_t(level)];
  const std::size_t n = t.size();
  // Shift slightly off the eigenvalue so the solve stays regular.
  const double shift = st.energy + 1e-10 * std::max(1.0, std::abs(st.energy));
  std::vector<double> v(n, 1.0), c(n), w(n);
  for (int it = 0; it < 3; ++it) {
    // Thomas algorithm on (T - shift) w = v.
    double den = t.diag[0] - shift;
    c[0] = n > 1 ? t.sub[0] / den : 0.0;
    w[0] = v[0] / den;
    for (std::size_t i = 1; i < n; ++i) {
      den = t.diag[i] - shift - t.sub[i - 1] * c[i - 1];
      if (i + 1 < n)
        c[i] = t.sub[i] / den;
      w[i] = (v[i] - t.sub[i - 1] * w[i - 1]) / den;
    }
    for (std::size_t i = n - 1; i-- > 0;)
      w[i] -= c[i] * w[i + 1];
    double norm = 0.0;
    for (double x : w)
      norm = std::max(norm, std::abs(x));
    for (std::size_t i = 0; i < n; ++i)
      v[i] = w[i] / norm;
  }
  st.x.reserve(n + 2);
  st.x.push_back(cfg.x_min);
  for (double x : grid(cfg))
    st.x.push_back(x);
  st.x.push_back(cfg.x_max);
  st.psi.assign(n + 2, 0.0);
  std::copy(v.begin(), v.end(), st.psi.begin() + 1);
  wavefunction::normalize(st.x, st.psi);
  return st;
}

} // namespace fdm
} // namespace morsekit
