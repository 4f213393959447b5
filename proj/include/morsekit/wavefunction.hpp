#pragma once
// Helpers for wavefunctions sampled on a grid.
#include "morsekit/error.hpp"
#include "morsekit/potential.hpp"
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace morsekit::wavefunction {

inline double trapezoid(std::span<const double> xs, std::span<const double> f) {
  if (xs.size() != f.size())
    throw Error(Errc::contract, "trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    s += 0.5 * (xs[i] - xs[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

inline double norm_squared(std::span<const double> xs,
                           std::span<const double> psi) {
  std::vector<double> sq(psi.size());
  std::transform(psi.begin(), psi.end(), sq.begin(),
                 [](double v) { return v * v; });
  return trapezoid(xs, sq);
}

//! Scales psi to unit trapezoidal norm and makes its first lobe positive.
inline void normalize(std::span<const double> xs, std::span<double> psi) {
  const double n2 = norm_squared(xs, psi);
  if (!(n2 > 0) || !std::isfinite(n2))
    throw Error(Errc::numerical_failure, "normalize: zero or non-finite norm");
  const double inv = 1.0 / std::sqrt(n2);
  double peak = 0.0;
  for (double &v : psi) {
    v *= inv;
    peak = std::max(peak, std::abs(v));
  }
  // Sign of the first lobe that rises above the tail noise.
  for (double v : psi) {
    if (std::abs(v) > 1e-3 * peak) {
      if (v < 0)
        for (double &w : psi)
          w = -w;
      break;
    }
  }
}

//! Sign changes of psi, ignoring samples below `rel_floor` times the peak.
inline int count_nodes(std::span<const double> psi, double rel_floor = 1e-6) {
  double peak = 0.0;
  for (double v : psi)
    peak = std::max(peak, std::abs(v));
  int nodes = 0;
  int last_sign = 0;
  for (double v : psi) {
    if (std::abs(v) <= rel_floor * peak)
      continue;
    const int s = v > 0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign)
      ++nodes;
    last_sign = s;
  }
  return nodes;
}

//! ||-psi''/2 + (V - E) psi|| / ||psi|| on the interior of a uniform grid,
//! psi'' by central differences.
inline double schrodinger_residual(const PotentialParams &p, double energy,
                                   std::span<const double> xs,
                                   std::span<const double> psi) {
  if (xs.size() != psi.size() || xs.size() < 3)
    throw Error(Errc::contract, "schrodinger_residual: bad grid");
  const double h = xs[1] - xs[0];
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const double d2 = (psi[i + 1] - 2 * psi[i] + psi[i - 1]) / (h * h);
    const double r = -0.5 * d2 +
                     (potential::eval_potential(p, xs[i]) - energy) * psi[i];
    num += r * r;
    den += psi[i] * psi[i];
  }
  return std::sqrt(num / den);
}

} // namespace morsekit::wavefunction
