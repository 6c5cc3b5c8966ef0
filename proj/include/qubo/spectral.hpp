#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubo/eigen.hpp"
#include "qubo/format.hpp"
#include "qubo/instance.hpp"

namespace qubo {

/// -1, 0 or +1. A zero eigenvalue contributes nothing to the augmentation.
inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// One eigenvalue with its unit eigenvector.
struct EigenPair {
  double lambda = 0.0;
  std::vector<double> c;
};

/// Leading eigenpairs of an instance, ordered by |lambda| descending.
struct SpectralSummary {
  std::vector<EigenPair> pairs;
  std::size_t k_computed = 0;
  /// All n eigenvalues, sorted descending by signed value. Populated on
  /// request for histogram export.
  std::optional<std::vector<double>> full_spectrum;
  /// max over returned pairs of ||Q c - lambda c||_2.
  double max_residual = 0.0;
};

/// Parameters of the rank-1 augmentation: weight M and component count k.
struct TransformConfig {
  double M = 0.0;
  std::size_t k = 0;
};

namespace detail {

/// |lambda| descending; exact ties prefer the more positive eigenvalue, then
/// the lower solver-output index (stable), so experiment runs are repeatable.
inline std::vector<std::size_t> abs_sorted_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double fa = std::fabs(values[a]), fb = std::fabs(values[b]);
    if (fa != fb) return fa > fb;
    return values[a] > values[b];
  });
  return order;
}

inline double eigenpair_residual(const QuboInstance& inst, double lambda,
                                 const std::vector<double>& c) {
  const std::size_t n = inst.n();
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* qi = inst.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += qi[j] * c[j];
    const double r = acc - lambda * c[i];
    sq += r * r;
  }
  return std::sqrt(sq);
}

}  // namespace detail

/**
 * The k eigenpairs of largest absolute eigenvalue, |lambda|-descending.
 * Deterministic up to eigenvector sign and up to basis choice inside
 * numerically degenerate clusters. Set keep_full_spectrum to also retain
 * all n eigenvalues for histogram export.
 */
inline SpectralSummary top_k_eigenpairs(const QuboInstance& inst, std::size_t k,
                                        bool keep_full_spectrum = false) {
  const std::size_t n = inst.n();
  if (k < 1 || k > n) throw std::invalid_argument("top_k_eigenpairs: k must be in [1, n]");

  auto eig = eigen_symmetric(n, inst.data(), /*with_vectors=*/true);
  const auto order = detail::abs_sorted_order(eig.values);

  SpectralSummary out;
  out.k_computed = k;
  out.pairs.reserve(k);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t idx = order[t];
    EigenPair pair;
    pair.lambda = eig.values[idx];
    pair.c.resize(n);
    for (std::size_t i = 0; i < n; ++i) pair.c[i] = eig.vectors[i * n + idx];
    out.max_residual =
        std::max(out.max_residual, detail::eigenpair_residual(inst, pair.lambda, pair.c));
    out.pairs.push_back(std::move(pair));
  }
  if (keep_full_spectrum) {
    std::vector<double> all = eig.values;
    std::sort(all.begin(), all.end(), std::greater<double>{});
    out.full_spectrum = std::move(all);
  }
  return out;
}

/// All n eigenvalues (no vectors), an unordered multiset sorted descending
/// by signed value for convenience.
inline std::vector<double> full_spectrum(const QuboInstance& inst) {
  auto eig = eigen_symmetric(inst.n(), inst.data(), /*with_vectors=*/false);
  std::sort(eig.values.begin(), eig.values.end(), std::greater<double>{});
  return eig.values;
}

/**
 * Applies the rank-1 augmentation using precomputed eigenpairs:
 *   q'[i][j] = q[i][j] + sum_{t<k} M * sign(lambda_t) * c_t[i] * c_t[j].
 * The offset is unchanged; the input is not mutated. With M == 0 or k == 0
 * the result is an exact copy.
 */
inline QuboInstance augment(const QuboInstance& inst, const SpectralSummary& summary,
                            const TransformConfig& config) {
  if (config.M < 0.0 || !std::isfinite(config.M))
    throw std::invalid_argument("augment: M must be finite and non-negative");
  if (config.k > inst.n()) throw std::invalid_argument("augment: k must be <= n");

  QuboInstance out = inst;
  out.set_name(inst.name().empty()
                   ? ""
                   : inst.name() + "[M=" + format_double(config.M) +
                         ",k=" + std::to_string(config.k) + "]");
  if (config.M == 0.0 || config.k == 0) return out;
  if (summary.pairs.size() < config.k)
    throw std::invalid_argument("augment: summary holds fewer than k eigenpairs");

  const std::size_t n = inst.n();
  for (std::size_t t = 0; t < config.k; ++t) {
    const auto& pair = summary.pairs[t];
    const double w = config.M * sign_of(pair.lambda);
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double wci = w * pair.c[i];
      for (std::size_t j = i; j < n; ++j) out.add(i, j, wci * pair.c[j]);
    }
  }
  return out;
}

/// Computes the top-k eigenpairs and applies the augmentation in one step.
inline QuboInstance transform_q(const QuboInstance& inst, const TransformConfig& config) {
  if (config.M == 0.0 || config.k == 0) {
    // validate M even on the identity path
    return augment(inst, SpectralSummary{}, config);
  }
  return augment(inst, top_k_eigenpairs(inst, config.k), config);
}

/// One row per eigenvalue, descending by signed value: "index,lambda".
inline void write_eigenvalues_csv(std::ostream& os, std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<double>{});
  os << "index,lambda\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    os << i << ',' << format_double(values[i]) << '\n';
}

}  // namespace qubo
