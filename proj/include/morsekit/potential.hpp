#pragma once
#include "morsekit/error.hpp"
#include "morsekit/parallel.hpp"
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace morsekit {

//! Physical parameters of
//!   V(x) = A (e^{lx}+q)^{-2} + B (e^{lx}+q)^{-1} + C e^{lx} - (A+qB)/q^2
//! in atomic units (hbar = m = 1).
struct PotentialParams {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double q = 1.0;
  double lambda = 1.0;
};

//! Parameters of the transformed problem. mu and ell depend on the energy and
//! are filled in by tra::complete_uparams.
struct UParams {
  std::optional<double> mu;
  double nu = -1.0;
  double D = 0.0;
  double F = 0.0;
  std::optional<double> ell;
};

enum class ExtremumKind { minimum, maximum, inflection };

struct Extremum {
  double x0 = 0.0;
  double z0 = 0.0; // 1/(e^{l x0} + q)
  double value = 0.0;
  ExtremumKind kind = ExtremumKind::minimum;
};

struct Extrema {
  std::vector<Extremum> points; // sorted by x0
  bool boundary_degenerate = false;
};

enum class SpectralClass { BoundOnly, ResonanceOnly, Mixed, NoStates };

constexpr std::string_view to_string(SpectralClass c) {
  switch (c) {
  case SpectralClass::BoundOnly: return "BoundOnly";
  case SpectralClass::ResonanceOnly: return "ResonanceOnly";
  case SpectralClass::Mixed: return "Mixed";
  case SpectralClass::NoStates: return "NoStates";
  }
  return "?";
}

namespace potential {

inline void validate(const PotentialParams &p) {
  if (!(p.q > 0))
    throw Error(Errc::domain, "potential: q must be positive");
  if (!(p.lambda > 0))
    throw Error(Errc::domain, "potential: lambda must be positive");
  if (!(p.C >= 0))
    throw Error(Errc::domain, "potential: C must be non-negative");
}

//! V(x). The two short-range terms are combined with their asymptotic offset
//! analytically so V -> 0 at -inf without cancellation.
inline double eval_potential(const PotentialParams &p, double x) {
  const double t = std::exp(p.lambda * x);
  const double u = t + p.q;
  const double q2 = p.q * p.q;
  const double a_part = -p.A * t * (t + 2 * p.q) / (q2 * u * u);
  const double b_part = -p.B * t / (p.q * u);
  return a_part + b_part + p.C * t;
}

//! dV/dx = lambda t (C - 2A z^3 - B z^2), z = 1/(t+q).
inline double eval_potential_derivative(const PotentialParams &p, double x) {
  const double t = std::exp(p.lambda * x);
  const double z = 1.0 / (t + p.q);
  return p.lambda * t * (p.C - 2 * p.A * z * z * z - p.B * z * z);
}

inline double tra_limit(double q, double lambda = 1.0) {
  return -lambda * lambda * q * q / 8.0;
}

//! nu, D, F from the physical parameters; mu and ell left unset.
inline UParams to_uparams(const PotentialParams &p) {
  validate(p);
  const double l2 = p.lambda * p.lambda;
  if (p.A < tra_limit(p.q, p.lambda))
    throw Error(Errc::tra_inadmissible,
                "to_uparams: A < -lambda^2 q^2/8, outside the TRA solution "
                "(use nhd or fdm)");
  UParams u;
  u.nu = -std::sqrt(std::max(0.0, 8 * p.A / (l2 * p.q * p.q) + 1));
  u.D = p.q * p.C / l2 - 2 * p.B / (p.q * l2) - 4 * p.A / (p.q * p.q * l2);
  u.F = p.q * p.C / l2;
  return u;
}

//! Physical B for which the transformed problem has parameter D.
inline double pps_gamma_from_D(double D, const PotentialParams &p) {
  return p.q * p.q * p.C / 2 - 2 * p.A / p.q - 0.5 * p.q * p.lambda * p.lambda * D;
}

//! Inverse of to_uparams at fixed (q, lambda).
inline PotentialParams from_uparams(const UParams &u, double q, double lambda) {
  PotentialParams p;
  p.q = q;
  p.lambda = lambda;
  const double l2 = lambda * lambda;
  p.A = l2 * q * q * (u.nu * u.nu - 1) / 8;
  p.C = u.F * l2 / q;
  p.B = pps_gamma_from_D(u.D, p);
  return p;
}

namespace detail {

// Real roots of a z^3 + b z^2 + c z + d, each polished by one Newton step.
inline std::vector<double> real_cubic_roots(double a, double b, double c,
                                            double d) {
  std::vector<double> roots;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c),
                                 std::abs(d)});
  if (scale == 0.0)
    return roots;
  if (std::abs(a) <= 1e-14 * scale) {
    if (std::abs(b) <= 1e-14 * scale) {
      if (c != 0.0)
        roots.push_back(-d / c);
      return roots;
    }
    const double disc = c * c - 4 * b * d;
    if (disc < 0)
      return roots;
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (c + std::copysign(sq, c));
    if (qq != 0.0) {
      roots.push_back(qq / b);
      roots.push_back(d / qq);
    } else {
      roots.push_back(0.0);
      roots.push_back(0.0);
    }
  } else {
    const double bb = b / a, cc = c / a, dd = d / a;
    const double Q = (bb * bb - 3 * cc) / 9;
    const double R = (2 * bb * bb * bb - 9 * bb * cc + 27 * dd) / 54;
    const double Q3 = Q * Q * Q;
    // R^2 - Q^3 from the discriminant, free of the bb^6 cancellation.
    const double gap = (4 * bb * bb * bb * dd - bb * bb * cc * cc +
                        4 * cc * cc * cc - 18 * bb * cc * dd + 27 * dd * dd) /
                       108;
    if (Q3 > 0 && gap <= 0) {
      const double ratio = std::clamp(R / std::sqrt(Q3), -1.0, 1.0);
      const double theta = std::acos(ratio);
      const double m = -2 * std::sqrt(Q);
      for (int k = 0; k < 3; ++k)
        roots.push_back(m * std::cos((theta + 2 * std::numbers::pi * k) / 3) -
                        bb / 3);
    } else {
      double Aa = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(std::max(gap, 0.0))), R);
      const double Bb = Aa == 0.0 ? 0.0 : Q / Aa;
      roots.push_back(Aa + Bb - bb / 3);
    }
  }
  for (double &z : roots) {
    const double f = ((a * z + b) * z + c) * z + d;
    const double df = (3 * a * z + 2 * b) * z + c;
    if (df == 0.0 || !std::isfinite(f / df))
      continue;
    const double zn = z - f / df;
    if (std::abs(((a * zn + b) * zn + c) * zn + d) < std::abs(f))
      z = zn;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

} // namespace detail

//! Interior extrema of V from the real roots of 2A z^3 + B z^2 - C = 0 with
//! z in (0, 1/q). Roots within 1e-10 of either endpoint are dropped and
//! reported through `boundary_degenerate`.
inline Extrema find_extrema(const PotentialParams &p) {
  validate(p);
  Extrema out;
  const double zmax = 1.0 / p.q;
  constexpr double edge = 1e-10;
  for (double z : detail::real_cubic_roots(2 * p.A, p.B, 0.0, -p.C)) {
    if (!(z > -edge && z < zmax + edge))
      continue;
    if (z <= edge || z >= zmax - edge) {
      out.boundary_degenerate = true;
      continue;
    }
    Extremum e;
    e.z0 = z;
    e.x0 = std::log(1.0 / z - p.q) / p.lambda;
    e.value = eval_potential(p, e.x0);
    // V'' = lambda^2 t^2 z^3 (6 A z + 2 B) at a stationary point.
    const double curv = 3 * p.A * z + p.B;
    const double curv_scale = std::max(std::abs(3 * p.A * z), std::abs(p.B));
    if (std::abs(curv) <= 1e-9 * std::max(curv_scale, 1e-300))
      e.kind = ExtremumKind::inflection;
    else
      e.kind = curv > 0 ? ExtremumKind::minimum : ExtremumKind::maximum;
    out.points.push_back(e);
  }
  // A double root shows up twice; keep a single inflection entry.
  std::sort(out.points.begin(), out.points.end(),
            [](const Extremum &a, const Extremum &b) { return a.x0 < b.x0; });
  out.points.erase(std::unique(out.points.begin(), out.points.end(),
                               [](const Extremum &a, const Extremum &b) {
                                 return std::abs(a.z0 - b.z0) <=
                                        1e-7 * std::max(1.0, a.z0);
                               }),
                   out.points.end());
  return out;
}

//! Minimum of V over the real line for the confining case (C > 0), or of the
//! interior minima otherwise. Empty if V has no interior minimum.
inline std::optional<Extremum> global_minimum(const PotentialParams &p) {
  std::optional<Extremum> best;
  for (const auto &e : find_extrema(p).points)
    if (e.kind == ExtremumKind::minimum && (!best || e.value < best->value))
      best = e;
  return best;
}

namespace detail {

inline SpectralClass classify_extrema(const std::vector<Extremum> &pts) {
  std::optional<Extremum> mn, mx;
  for (const auto &e : pts) {
    if (e.kind == ExtremumKind::minimum && (!mn || e.value < mn->value))
      mn = e;
    if (e.kind == ExtremumKind::maximum && (!mx || e.value > mx->value))
      mx = e;
  }
  if (!mn)
    return SpectralClass::NoStates;
  if (!mx)
    return mn->value < 0 ? SpectralClass::BoundOnly : SpectralClass::NoStates;
  if (mn->value < 0)
    return mx->value > 0 ? SpectralClass::Mixed : SpectralClass::BoundOnly;
  // With at most three stationary points every maximum neighbours every
  // minimum, so it lies strictly above it.
  return SpectralClass::ResonanceOnly;
}

} // namespace detail

//! Spectral class of a confining (C > 0) configuration from its extrema.
inline SpectralClass classify(const PotentialParams &p) {
  validate(p);
  if (!(p.C > 0))
    throw Error(Errc::wrong_branch,
                "classify: C = 0 is the unconfined branch, use classify_unconfined");
  return detail::classify_extrema(find_extrema(p).points);
}

//! C = 0: bound states exist iff V has a negative interior minimum.
inline SpectralClass classify_unconfined(const PotentialParams &p) {
  validate(p);
  if (p.C != 0)
    throw Error(Errc::wrong_branch, "classify_unconfined: requires C = 0");
  const auto m = global_minimum(p);
  return m && m->value < 0 ? SpectralClass::BoundOnly : SpectralClass::NoStates;
}

//! A on the blue-region boundary, 2A = q^3 C - q B.
inline double boundary_blue_green(double B, double C, double q) {
  return (q * q * q * C - q * B) / 2;
}

//! B on the red/grey boundary B^3 = 27 A^2 C (independent of q).
inline double boundary_red_grey(double A, double C) {
  return std::cbrt(27 * A * A * C);
}

//! Closed-form green/red boundary A = q^2 sqrt(BC) - q(B + q^2 C).
inline double boundary_green_red(double B, double C, double q) {
  if (B < 0 || C < 0)
    throw Error(Errc::domain, "boundary_green_red: requires B >= 0, C >= 0");
  return q * q * std::sqrt(B * C) - q * (B + q * q * C);
}

//! Locus where the interior minimum touches zero (V = V' = 0 with the
//! stationary point inside (0, 1/q)), solved in closed form:
//!   A = 2 q^2 sqrt(C (B + q^2 C)) - q (B + 2 q^2 C),  valid for B > 3 q^2 C.
inline double boundary_green_red_geometric(double B, double C, double q) {
  if (B < 0 || C < 0)
    throw Error(Errc::domain,
                "boundary_green_red_geometric: requires B >= 0, C >= 0");
  return 2 * q * q * std::sqrt(C * (B + q * q * C)) - q * (B + 2 * q * q * C);
}

struct PhaseGrid {
  std::vector<double> a_over_c; // columns
  std::vector<double> b_over_c; // rows
  double C = 1.0, q = 1.0, lambda = 1.0;
  std::vector<SpectralClass> classes; // row-major: [ib * n_a + ia]

  SpectralClass at(std::size_t ia, std::size_t ib) const {
    return classes[ib * a_over_c.size() + ia];
  }
};

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(std::max(n, 0)));
  if (n == 1)
    v[0] = lo;
  for (int i = 0; n > 1 && i < n; ++i)
    v[std::size_t(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

//! Classifies every (A/C, B/C) grid point at fixed C, q, lambda.
inline PhaseGrid phase_diagram_grid(std::array<double, 2> a_range,
                                    std::array<double, 2> b_range, int n_a,
                                    int n_b, double C, double q,
                                    double lambda = 1.0) {
  if (n_a < 1 || n_b < 1)
    throw Error(Errc::domain, "phase_diagram_grid: grid sizes must be positive");
  if (!(C > 0))
    throw Error(Errc::domain, "phase_diagram_grid: C must be positive");
  PhaseGrid g;
  g.a_over_c = linspace(a_range[0], a_range[1], n_a);
  g.b_over_c = linspace(b_range[0], b_range[1], n_b);
  g.C = C;
  g.q = q;
  g.lambda = lambda;
  g.classes.resize(std::size_t(n_a) * std::size_t(n_b));
  parallel_for(std::size_t(n_b), [&](std::size_t ib) {
    for (std::size_t ia = 0; ia < std::size_t(n_a); ++ia) {
      const PotentialParams p{g.a_over_c[ia] * C, g.b_over_c[ib] * C, C, q,
                              lambda};
      g.classes[ib * std::size_t(n_a) + ia] = classify(p);
    }
  });
  return g;
}

} // namespace potential
} // namespace morsekit
