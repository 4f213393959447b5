#pragma once
#include "morsekit/error.hpp"
#include "morsekit/sym_tridiag.hpp"
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace morsekit {

//! Row-major dense square matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n, double fill = 0.0)
      : m_n(n), m_data(n * n, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const noexcept { return m_n; }
  double &operator()(std::size_t i, std::size_t j) { return m_data[i * m_n + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return m_data[i * m_n + j];
  }

  //! Column j as a vector.
  std::vector<double> column(std::size_t j) const {
    std::vector<double> c(m_n);
    for (std::size_t i = 0; i < m_n; ++i)
      c[i] = (*this)(i, j);
    return c;
  }

private:
  std::size_t m_n = 0;
  std::vector<double> m_data;
};

struct EigenResult {
  std::vector<double> values;         // ascending
  std::optional<DenseMatrix> vectors; // columns, when requested
};

namespace linalg {

inline constexpr int max_sweeps_per_eigenvalue = 50;

namespace detail {

// Implicit-shift QL on (d, e) where e[i] couples i and i+1, e[n-1] = 0 on
// entry. If z is non-null, rotations are accumulated into its columns.
// After return d holds the (unsorted) eigenvalues.
inline void implicit_ql(std::vector<double> &d, std::vector<double> &e,
                        DenseMatrix *z) {
  const std::size_t n = d.size();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(d[i]) || !std::isfinite(e[i]))
      throw Error(Errc::numerical_failure,
                  "implicit QL: non-finite matrix entry at row " +
                      std::to_string(i),
                  int(i));
  double shift_acc = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1)
      ++m;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_sweeps_per_eigenvalue)
          throw Error(Errc::numerical_failure,
                      "implicit QL did not converge for eigenvalue " +
                          std::to_string(l),
                      int(l));
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0)
          r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i)
          d[i] -= h;
        shift_acc += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (z) {
            for (std::size_t k = 0; k < n; ++k) {
              h = (*z)(k, ii + 1);
              (*z)(k, ii + 1) = s * (*z)(k, ii) + c * h;
              (*z)(k, ii) = c * (*z)(k, ii) - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += shift_acc;
    e[l] = 0.0;
  }
}

inline EigenResult sorted_result(std::vector<double> d,
                                 std::optional<DenseMatrix> z) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  EigenResult res;
  res.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    res.values[i] = d[order[i]];
  if (z) {
    DenseMatrix v(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        v(i, j) = (*z)(i, order[j]);
    res.vectors = std::move(v);
  }
  return res;
}

// Householder reduction of a symmetric matrix to tridiagonal form
// (EISPACK tred2 ordering). On return z holds the orthogonal transform,
// d the diagonal, e[i] the coupling between i and i+1 (e[n-1] = 0).
inline void householder_tridiagonalize(DenseMatrix &z, std::vector<double> &d,
                                       std::vector<double> &e) {
  const std::size_t n = z.size();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    d[j] = z(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0, h = 0.0;
    for (std::size_t k = 0; k < i; ++k)
      scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = z(i - 1, j);
        z(i, j) = 0.0;
        z(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0)
        g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j)
        e[j] = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        z(j, i) = f;
        g = e[j] + z(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += z(k, j) * d[k];
          e[k] += z(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j)
        e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k)
          z(k, j) -= (f * e[k] + g * d[k]);
        d[j] = z(i - 1, j);
        z(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  // Accumulate transformations.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    z(n - 1, i) = z(i, i);
    z(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k)
        d[k] = z(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k)
          g += z(k, i + 1) * z(k, j);
        for (std::size_t k = 0; k <= i; ++k)
          z(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k)
      z(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = z(n - 1, j);
    z(n - 1, j) = 0.0;
  }
  z(n - 1, n - 1) = 1.0;

  // tred2 leaves e[i] coupling (i-1, i); shift to (i, i+1).
  for (std::size_t i = 1; i < n; ++i)
    e[i - 1] = e[i];
  e[n - 1] = 0.0;
}

} // namespace detail

//! Eigen-decomposition of a symmetric tridiagonal matrix by implicit-shift
//! QL. Eigenvectors are accumulated only when asked for.
inline EigenResult eigh_tridiag(const SymTridiag &t, bool want_vectors = false) {
  const std::size_t n = t.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  std::copy(t.sub.begin(), t.sub.end(), e.begin());
  std::optional<DenseMatrix> z;
  if (want_vectors)
    z = DenseMatrix::identity(n);
  detail::implicit_ql(d, e, z ? &*z : nullptr);
  return detail::sorted_result(std::move(d), std::move(z));
}

//! Householder tridiagonalization followed by implicit QL.
inline EigenResult eigh_dense(const DenseMatrix &m, bool want_vectors = false) {
  const std::size_t n = m.size();
  if (n == 0)
    throw Error(Errc::contract, "eigh_dense: empty matrix");
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      norm = std::max(norm, std::abs(m(i, j)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * std::max(norm, 1e-300))
        throw Error(Errc::contract, "eigh_dense: matrix is not symmetric");

  DenseMatrix z = m;
  std::vector<double> d, e;
  detail::householder_tridiagonalize(z, d, e);
  detail::implicit_ql(d, e, want_vectors ? &z : nullptr);
  std::optional<DenseMatrix> vz;
  if (want_vectors)
    vz = std::move(z);
  return detail::sorted_result(std::move(d), std::move(vz));
}

//! Number of eigenvalues of t strictly below x (Sturm sequence count).
inline std::size_t sturm_count(const SymTridiag &t, double x) {
  constexpr double tiny = 1e-300;
  std::size_t count = 0;
  double q = t.diag[0] - x;
  if (q < 0)
    ++count;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (q == 0.0)
      q = tiny;
    q = t.diag[i] - x - t.sub[i - 1] * t.sub[i - 1] / q;
    if (q < 0)
      ++count;
  }
  return count;
}

//! All eigenvalues below `upper`, ascending, by Sturm bisection. Linear cost
//! per bisection step, which suits very large grids where only a handful of
//! low eigenvalues are wanted.
inline std::vector<double> eigvals_below(const SymTridiag &t, double upper,
                                         double abs_tol = 1e-14) {
  const std::size_t n = t.size();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0)
      r += std::abs(t.sub[i - 1]);
    if (i + 1 < n)
      r += std::abs(t.sub[i]);
    lo = std::min(lo, t.diag[i] - r);
  }
  const std::size_t count = sturm_count(t, upper);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    double a = lo, b = upper;
    for (int it = 0; it < 200 && b - a > abs_tol * std::max(1.0, std::abs(a));
         ++it) {
      const double mid = 0.5 * (a + b);
      if (sturm_count(t, mid) > k)
        b = mid;
      else
        a = mid;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

//! Dense matrix from a SymTridiag.
inline DenseMatrix to_dense(const SymTridiag &t) {
  DenseMatrix m(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    m(i, i) = t.diag[i];
    if (i + 1 < t.size()) {
      m(i, i + 1) = t.sub[i];
      m(i + 1, i) = t.sub[i];
    }
  }
  return m;
}

} // namespace linalg
} // namespace morsekit
