#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubo/errors.hpp"

// Dense symmetric eigensolver: Householder reduction to tridiagonal form
// followed by implicit-shift QL sweeps (EISPACK tred2/tql2 lineage). Dense
// O(n^3) solves are robust and entirely adequate at the sizes this toolkit
// targets (n up to a few thousand).

namespace qubo {

struct SymmetricEigenResult {
  /// Eigenvalues in the solver's output order (no ordering guarantee).
  std::vector<double> values;
  /// Row-major n x n matrix whose column j is the unit eigenvector of
  /// values[j]. Empty when vectors were not requested.
  std::vector<double> vectors;
};

namespace detail {

/// Reduces symmetric a (row-major, destroyed) to tridiagonal form.
/// d receives the diagonal, e the subdiagonal in e[1..n-1] (e[0] = 0).
/// When accumulate is set, a is overwritten with the orthogonal similarity
/// transform so eigenvectors can be recovered by the QL stage.
inline void householder_tridiagonalize(std::size_t n, std::vector<double>& a,
                                       std::vector<double>& d, std::vector<double>& e,
                                       bool accumulate) {
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(a[i * n + k]);
      if (scale == 0.0) {
        e[i] = a[i * n + l];
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a[i * n + k] /= scale;
          h += a[i * n + k] * a[i * n + k];
        }
        double f = a[i * n + l];
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a[i * n + l] = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          if (accumulate) a[j * n + i] = a[i * n + j] / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a[j * n + k] * a[i * n + k];
          for (std::size_t k = j + 1; k <= l; ++k) g += a[k * n + j] * a[i * n + k];
          e[j] = g / h;
          f += e[j] * a[i * n + j];
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a[i * n + j];
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            a[j * n + k] -= f * e[k] + g * a[i * n + k];
        }
      }
    } else {
      e[i] = a[i * n + l];
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  if (accumulate) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && d[i] != 0.0) {
        const std::size_t l = i - 1;
        for (std::size_t j = 0; j <= l; ++j) {
          double g = 0.0;
          for (std::size_t k = 0; k <= l; ++k) g += a[i * n + k] * a[k * n + j];
          for (std::size_t k = 0; k <= l; ++k) a[k * n + j] -= g * a[k * n + i];
        }
      }
      d[i] = a[i * n + i];
      a[i * n + i] = 1.0;
      if (i > 0)
        for (std::size_t j = 0; j < i; ++j) a[j * n + i] = a[i * n + j] = 0.0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i];
  }
}

/// Implicit-shift QL on the tridiagonal (d, e); d becomes the eigenvalues.
/// When z is non-null the rotations are applied to its columns as well.
/// Throws convergence_error when the sweep budget is exhausted.
inline void ql_implicit_shift(std::size_t n, std::vector<double>& d, std::vector<double>& e,
                              std::vector<double>* z, std::size_t sweep_cap) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  std::size_t sweeps = 0;
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (++sweeps > sweep_cap) {
          double worst = 0.0;
          for (std::size_t i = 0; i + 1 < n; ++i) worst = std::max(worst, std::fabs(e[i]));
          throw convergence_error(
              "symmetric eigensolver: no convergence after " + std::to_string(sweep_cap) +
                  " QL sweeps",
              worst);
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t ii = m; ii-- > l;) {
          double f = s * e[ii];
          const double b = c * e[ii];
          r = std::hypot(f, g);
          e[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - p;
          r = (d[ii] - g) * s + 2.0 * c * b;
          p = s * r;
          d[ii + 1] = g + p;
          g = c * r - b;
          if (z) {
            double* zz = z->data();
            for (std::size_t k = 0; k < n; ++k) {
              f = zz[k * n + ii + 1];
              zz[k * n + ii + 1] = s * zz[k * n + ii] + c * f;
              zz[k * n + ii] = c * zz[k * n + ii] - s * f;
            }
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

/**
 * Full eigendecomposition of a dense symmetric matrix (row-major, size n*n).
 * Symmetry is assumed, not checked; callers hand in QuboInstance data which
 * is symmetric by construction.
 *
 * sweep_cap == 0 selects the default budget of 100 * n QL sweeps.
 */
inline SymmetricEigenResult eigen_symmetric(std::size_t n, std::vector<double> a,
                                            bool with_vectors = true,
                                            std::size_t sweep_cap = 0) {
  if (n == 0) throw std::invalid_argument("eigen_symmetric: empty matrix");
  if (a.size() != n * n) throw std::invalid_argument("eigen_symmetric: bad matrix size");
  if (sweep_cap == 0) sweep_cap = 100 * n;

  SymmetricEigenResult out;
  if (n == 1) {
    out.values = {a[0]};
    if (with_vectors) out.vectors = {1.0};
    return out;
  }

  std::vector<double> d, e;
  detail::householder_tridiagonalize(n, a, d, e, with_vectors);
  detail::ql_implicit_shift(n, d, e, with_vectors ? &a : nullptr, sweep_cap);
  out.values = std::move(d);
  if (with_vectors) out.vectors = std::move(a);
  return out;
}

}  // namespace qubo
