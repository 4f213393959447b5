#pragma once
// Potential parameter spectrum: scan trial energies, collect the values of B
// for which each trial energy is an exact TRA eigenvalue, then invert the
// per-level B(E) curves at the physical B. B enters only through D on the
// diagonal, so the eigenvalues of T(E) = wave operator + D are the admissible
// D values at energy E.
#include "morsekit/error.hpp"
#include "morsekit/linalg.hpp"
#include "morsekit/parallel.hpp"
#include "morsekit/potential.hpp"
#include "morsekit/spectrum.hpp"
#include "morsekit/tra.hpp"
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace morsekit {

enum class FitKind { monotone_cubic, linear };

struct PpsConfig {
  double e_min = -1.0;
  double e_max = -1e-6;
  int m_points = 200;
  int n_requested = 64; // cap on the per-energy matrix size
  FitKind fit = FitKind::monotone_cubic;
  bool polish = false; // refine each fitted energy by root finding on B_n(E)
};

//! One scan energy and the B values (ascending) that make it an eigenvalue.
//! Rank n within `b_values` tracks level n.
struct PpsRow {
  double energy = 0.0;
  std::vector<double> b_values;
  int basis_size = 0;
  bool dropped_spurious = false;
};

struct PpsTable {
  std::vector<PpsRow> rows; // ascending energy
};

struct LevelFit {
  double energy = 0.0;
  int support = 0;       // points in the fitted segment
  double residual = 0.0; // |cubic - linear| at the target, an error proxy
};

namespace pps {

//! T(E) on min(n, n_max_effective(E) + 1) basis functions. Its eigenvalues are
//! the D values for which E is an exact eigenvalue.
inline SymTridiag build_T(const PotentialParams &p, double E, int n) {
  const auto st = tra::basis_state(p, E);
  const int size = std::min(n, st.size());
  if (size < 1)
    throw Error(Errc::basis_exhausted,
                "build_T: no square-integrable basis function at this energy");
  auto t = tra::wave_operator_matrix(st.uparams, size);
  for (double &d : t.diag)
    d += st.uparams.D;
  return t;
}

//! B values at one energy, ascending. Right after the basis gains a function
//! (mu+nu+2N+1 in (-1, 0)), the pole of Q_N produces one eigenvalue carried
//! almost entirely by the last basis function; it has no physical
//! counterpart and is removed.
inline PpsRow scan_row(const PotentialParams &p, double E, int n_requested) {
  const auto st = tra::basis_state(p, E);
  const int size = std::min(n_requested, st.size());
  const SymTridiag t = build_T(p, E, n_requested);
  PpsRow row;
  row.energy = E;
  row.basis_size = size;
  const double edge = *st.uparams.mu + st.uparams.nu + 2 * (size - 1) + 1;
  std::vector<double> dvals;
  if (size > 1 && size == st.size() && edge > -1.0) {
    const auto eig = linalg::eigh_tridiag(t, true);
    std::size_t worst = 0;
    double worst_w = -1.0;
    for (std::size_t j = 0; j < eig.values.size(); ++j) {
      const double w = std::pow((*eig.vectors)(std::size_t(size - 1), j), 2);
      if (w > worst_w) {
        worst_w = w;
        worst = j;
      }
    }
    for (std::size_t j = 0; j < eig.values.size(); ++j)
      if (j != worst)
        dvals.push_back(eig.values[j]);
    row.dropped_spurious = true;
  } else {
    dvals = linalg::eigh_tridiag(t, false).values;
  }
  row.b_values.reserve(dvals.size());
  for (double d : dvals)
    row.b_values.push_back(potential::pps_gamma_from_D(d, p));
  std::sort(row.b_values.begin(), row.b_values.end());
  return row;
}

//! Scan window [V_min + 1e-6, -1e-6]; empty when V has no negative minimum.
inline std::optional<PpsConfig> default_config(const PotentialParams &p) {
  const auto m = potential::global_minimum(p);
  if (!m || !(m->value < -2e-6))
    return std::nullopt;
  PpsConfig cfg;
  cfg.e_min = m->value + 1e-6;
  cfg.e_max = -1e-6;
  return cfg;
}

inline PpsTable pps_scan(const PotentialParams &p, const PpsConfig &cfg) {
  if (!(cfg.e_min < cfg.e_max && cfg.e_max < 0))
    throw Error(Errc::domain, "pps_scan: need e_min < e_max < 0");
  if (cfg.m_points < 2 || cfg.n_requested < 1)
    throw Error(Errc::domain, "pps_scan: need m_points >= 2, n_requested >= 1");
  potential::to_uparams(p); // admissibility check up front
  const auto energies = potential::linspace(cfg.e_min, cfg.e_max, cfg.m_points);
  std::vector<std::optional<PpsRow>> rows(energies.size());
  parallel_for(energies.size(), [&](std::size_t k) {
    try {
      rows[k] = scan_row(p, energies[k], cfg.n_requested);
    } catch (const Error &e) {
      if (e.code() != Errc::basis_exhausted)
        throw;
    }
  });
  PpsTable table;
  for (auto &r : rows)
    if (r)
      table.rows.push_back(std::move(*r));
  if (table.rows.empty())
    throw Error(Errc::basis_exhausted,
                "pps_scan: the basis is empty at every scanned energy");
  return table;
}

namespace detail {

// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Butland
// slopes), x strictly increasing.
inline double monotone_cubic(const std::vector<double> &x,
                             const std::vector<double> &y, double xq) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), slope(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    delta[k] = (y[k + 1] - y[k]) / h[k];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0)
      continue;
    const double w1 = 2 * h[k] + h[k - 1], w2 = h[k] + 2 * h[k - 1];
    slope[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0)
      s = 0;
    else if (d0 * d1 <= 0 && std::abs(s) > 3 * std::abs(d0))
      s = 3 * d0;
    return s;
  };
  if (n == 2) {
    slope[0] = slope[1] = delta[0];
  } else {
    slope[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    slope[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }
  std::size_t k = std::size_t(std::upper_bound(x.begin(), x.end(), xq) - x.begin());
  k = std::clamp<std::size_t>(k, 1, n - 1) - 1;
  const double t = (xq - x[k]) / h[k];
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * h[k] * slope[k] +
         (-2 * t3 + 3 * t2) * y[k + 1] + (t3 - t2) * h[k] * slope[k + 1];
}

inline double linear(const std::vector<double> &x, const std::vector<double> &y,
                     double xq) {
  std::size_t k = std::size_t(std::upper_bound(x.begin(), x.end(), xq) - x.begin());
  k = std::clamp<std::size_t>(k, 1, x.size() - 1) - 1;
  const double t = (xq - x[k]) / (x[k + 1] - x[k]);
  return (1 - t) * y[k] + t * y[k + 1];
}

struct Segment {
  std::vector<double> energy;
  std::vector<double> b;
};

// Rank-n series split wherever B(E) stops being strictly monotone or jumps by
// far more than the typical step (a rank crossing).
inline std::vector<Segment> level_segments(const PpsTable &table, int n) {
  std::vector<double> es, bs;
  for (const auto &r : table.rows)
    if (int(r.b_values.size()) > n) {
      es.push_back(r.energy);
      bs.push_back(r.b_values[std::size_t(n)]);
    }
  std::vector<Segment> segs;
  if (es.empty())
    return segs;
  std::vector<double> steps;
  for (std::size_t i = 1; i < bs.size(); ++i)
    steps.push_back(std::abs(bs[i] - bs[i - 1]));
  double typical = 0.0;
  if (!steps.empty()) {
    auto mid = steps.begin() + long(steps.size() / 2);
    std::nth_element(steps.begin(), mid, steps.end());
    typical = *mid;
  }
  Segment cur{{es[0]}, {bs[0]}};
  int dir = 0;
  for (std::size_t i = 1; i < es.size(); ++i) {
    const double step = bs[i] - bs[i - 1];
    const int s = step > 0 ? 1 : (step < 0 ? -1 : 0);
    const bool jump = typical > 0 && std::abs(step) > 20 * typical;
    if (s == 0 || jump || (dir != 0 && s != dir)) {
      segs.push_back(std::move(cur));
      cur = Segment{{es[i]}, {bs[i]}};
      dir = 0;
      continue;
    }
    dir = s;
    cur.energy.push_back(es[i]);
    cur.b.push_back(bs[i]);
  }
  segs.push_back(std::move(cur));
  return segs;
}

} // namespace detail

//! E(b_target) along level n from the scan table.
inline LevelFit pps_fit_level(const PpsTable &table, int n, double b_target,
                              FitKind kind = FitKind::monotone_cubic) {
  const auto segs = detail::level_segments(table, n);
  const detail::Segment *best = nullptr;
  for (const auto &seg : segs) {
    const auto [lo, hi] = std::minmax_element(seg.b.begin(), seg.b.end());
    if (b_target >= *lo && b_target <= *hi &&
        (!best || seg.b.size() > best->b.size()))
      best = &seg;
  }
  if (!best)
    throw Error(Errc::not_found,
                "pps_fit_level: B outside the range covered by level " +
                    std::to_string(n));
  if (best->b.size() < 4)
    throw Error(Errc::insufficient_data,
                "pps_fit_level: fewer than 4 scan points support level " +
                    std::to_string(n));

  // Interpolate E as a function of B, abscissae ascending.
  std::vector<double> x = best->b, y = best->energy;
  if (x.front() > x.back()) {
    std::reverse(x.begin(), x.end());
    std::reverse(y.begin(), y.end());
  }
  LevelFit fit;
  fit.support = int(x.size());
  const double lin = detail::linear(x, y, b_target);
  if (kind == FitKind::linear) {
    fit.energy = lin;
    fit.residual = 0.0;
  } else {
    fit.energy = detail::monotone_cubic(x, y, b_target);
    fit.residual = std::abs(fit.energy - lin);
  }
  if (!(fit.energy < 0))
    throw Error(Errc::not_found, "pps_fit_level: fitted energy is not negative");
  return fit;
}

namespace detail {

// Root of B_n(E) = b_target between two scan energies, by Illinois
// false position. Returns nullopt if the bracket does not hold.
inline std::optional<double> polish_level(const PotentialParams &p, int n,
                                          double b_target, int n_requested,
                                          double e_lo, double e_hi) {
  auto g = [&](double e) -> std::optional<double> {
    const auto row = scan_row(p, e, n_requested);
    if (int(row.b_values.size()) <= n)
      return std::nullopt;
    return row.b_values[std::size_t(n)] - b_target;
  };
  auto ga = g(e_lo), gb = g(e_hi);
  if (!ga || !gb || (*ga) * (*gb) > 0)
    return std::nullopt;
  double a = e_lo, b = e_hi, fa = *ga, fb = *gb;
  int side = 0;
  for (int it = 0; it < 100 && std::abs(b - a) > 1e-15 * std::abs(a); ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const auto gc = g(c);
    if (!gc)
      return std::nullopt;
    if (*gc == 0.0)
      return c;
    if ((*gc) * fb > 0) {
      b = c;
      fb = *gc;
      if (side == -1)
        fa /= 2;
      side = -1;
    } else {
      a = c;
      fa = *gc;
      if (side == 1)
        fb /= 2;
      side = 1;
    }
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

} // namespace detail

//! Bound-state energies at the physical B: every level whose B(E) curve
//! covers p.B with a negative energy.
inline Spectrum pps_spectrum(const PotentialParams &p, const PpsConfig &cfg) {
  Spectrum sp;
  sp.method = Method::pps;
  sp.params = p;
  sp.diagnostic_name = "fit_residual";
  const PpsTable table = pps_scan(p, cfg);
  std::size_t max_rank = 0;
  for (const auto &r : table.rows)
    max_rank = std::max(max_rank, r.b_values.size());
  for (int n = 0; n < int(max_rank); ++n) {
    LevelFit fit;
    try {
      fit = pps_fit_level(table, n, p.B, cfg.fit);
    } catch (const Error &e) {
      if (e.code() == Errc::not_found || e.code() == Errc::insufficient_data)
        continue;
      throw;
    }
    Level l;
    l.energy = fit.energy;
    l.diagnostic = fit.residual;
    l.support = fit.support;
    if (cfg.polish) {
      const double step = (cfg.e_max - cfg.e_min) / (cfg.m_points - 1);
      const double lo = std::max(cfg.e_min, fit.energy - 2 * step);
      const double hi = std::min(cfg.e_max, fit.energy + 2 * step);
      if (auto e = detail::polish_level(p, n, p.B, cfg.n_requested, lo, hi)) {
        l.diagnostic = std::abs(*e - fit.energy);
        l.energy = *e;
      }
    }
    sp.levels.push_back(l);
  }
  std::sort(sp.levels.begin(), sp.levels.end(),
            [](const Level &a, const Level &b) { return a.energy < b.energy; });
  for (std::size_t i = 0; i < sp.levels.size(); ++i)
    sp.levels[i].index = int(i);
  return sp;
}

//! Default window and settings; empty spectrum when V has no negative well.
inline Spectrum pps_spectrum(const PotentialParams &p) {
  potential::to_uparams(p);
  if (auto cfg = default_config(p))
    return pps_spectrum(p, *cfg);
  Spectrum sp;
  sp.method = Method::pps;
  sp.params = p;
  sp.diagnostic_name = "fit_residual";
  return sp;
}

//! f_n = f_0 P_n(D) from the three-term recursion of T(E_m) at the physical
//! D, seeded f_0 = 1 and scaled to unit sum of squares.
inline TraCoeffs pps_wavefunction_coeffs(const PotentialParams &p, double energy) {
  const auto st = tra::basis_state(p, energy);
  if (st.uparams.F == 0)
    throw Error(Errc::wrong_branch,
                "pps_wavefunction_coeffs: F = 0 is the diagonal branch");
  const SymTridiag t = build_T(p, energy, st.size());
  const double z = st.uparams.D;
  const std::size_t n = t.size();
  TraCoeffs c;
  c.energy = energy;
  c.f.assign(n, 0.0);
  c.f[0] = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double r = (t.diag[k] - z) * c.f[k];
    if (k > 0)
      r += t.sub[k - 1] * c.f[k - 1];
    c.f[k + 1] = -r / t.sub[k];
  }
  double norm = 0.0, peak = 0.0;
  for (double v : c.f) {
    norm += v * v;
    peak = std::max(peak, std::abs(v));
  }
  c.unstable = peak > 1e12;
  norm = std::sqrt(norm);
  for (double &v : c.f)
    v /= norm;
  return c;
}

} // namespace pps
} // namespace morsekit
