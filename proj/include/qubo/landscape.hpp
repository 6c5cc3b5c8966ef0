#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "qubo/flip_gains.hpp"
#include "qubo/format.hpp"
#include "qubo/instance.hpp"
#include "qubo/rng.hpp"
#include "qubo/spectral.hpp"

namespace qubo {

/// Random-walk parameters for autocorrelation estimation.
struct WalkConfig {
  std::size_t walk_length = 1'000'000;  ///< recorded steps L
  std::uint64_t seed = 0;
  std::size_t max_lag = 100;
  std::size_t burn_in = 1000;  ///< discarded leading steps
};

/// Autocorrelation estimates from one random walk.
struct LandscapeStats {
  /// Correlation length -1 / ln(rho(1)); absent when rho(1) is outside (0,1)
  /// or the walk had zero variance.
  std::optional<double> xi;
  bool zero_variance = false;
  /// rho[d-1] is the lag-d autocorrelation, d = 1..max_lag.
  std::vector<double> rho;
  double walk_mean = 0.0;
  double walk_variance = 0.0;
};

/**
 * Estimates the landscape autocorrelation by an L-step random walk that
 * flips one uniformly random bit per step. rho(d) is the empirical
 * autocorrelation of the objective series; the correlation length is
 * xi = -1 / ln(rho(1)) when 0 < rho(1) < 1.
 *
 * A constant series (zero matrix) is reported via the zero_variance flag
 * rather than an error.
 */
inline LandscapeStats random_walk_autocorrelation(const QuboInstance& inst,
                                                  const WalkConfig& cfg) {
  const std::size_t n = inst.n();
  if (n < 2) throw std::invalid_argument("random_walk_autocorrelation: n must be >= 2");
  if (cfg.max_lag < 1) throw std::invalid_argument("random_walk_autocorrelation: max_lag must be >= 1");
  if (cfg.walk_length < 100 * cfg.max_lag)
    throw std::invalid_argument(
        "random_walk_autocorrelation: walk_length must be >= 100 * max_lag");

  rng::engine gen(cfg.seed);
  bitvec x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(gen() & 1u);
  FlipGainState state(inst, std::move(x));

  for (std::size_t t = 0; t < cfg.burn_in; ++t)
    state.apply_flip(rng::uniform_index(gen, n));

  const std::size_t L = cfg.walk_length;
  std::vector<double> f(L);
  for (std::size_t t = 0; t < L; ++t) {
    state.apply_flip(rng::uniform_index(gen, n));
    f[t] = state.value();
    if ((t & 0xffff) == 0xffff) state.reset(bitvec(state.x()));  // bound incremental drift
  }

  LandscapeStats out;
  double sum = 0.0;
  for (const double v : f) sum += v;
  const double mean = sum / static_cast<double>(L);
  double ss = 0.0;
  for (double& v : f) {
    v -= mean;
    ss += v * v;
  }
  out.walk_mean = mean;
  out.walk_variance = ss / static_cast<double>(L);
  if (ss <= 0.0) {
    out.zero_variance = true;
    out.rho.assign(cfg.max_lag, 0.0);
    return out;
  }

  out.rho.resize(cfg.max_lag);
  for (std::size_t d = 1; d <= cfg.max_lag; ++d) {
    double acc = 0.0;
    for (std::size_t t = 0; t + d < L; ++t) acc += f[t] * f[t + d];
    out.rho[d - 1] = acc / ss;
  }
  const double r1 = out.rho[0];
  if (r1 > 0.0 && r1 < 1.0) out.xi = -1.0 / std::log(r1);
  return out;
}

/// One autocorrelation estimate per (M, k) grid cell.
struct XiGrid {
  std::vector<double> Ms;
  std::vector<std::size_t> ks;
  std::vector<LandscapeStats> cells;  ///< row-major, ks x Ms

  const LandscapeStats& at(std::size_t ki, std::size_t mi) const {
    return cells[ki * Ms.size() + mi];
  }
};

/**
 * Transforms the instance for every (M, k) cell and estimates xi on each
 * result. Eigenpairs are computed once for the largest k requested; each
 * cell walks with its own seed derived from (config seed, M, k).
 */
inline XiGrid xi_grid(const QuboInstance& inst, const std::vector<double>& Ms,
                      const std::vector<std::size_t>& ks, const WalkConfig& cfg) {
  if (Ms.empty() || ks.empty()) throw std::invalid_argument("xi_grid: empty grid");
  const std::size_t k_max = *std::max_element(ks.begin(), ks.end());
  if (k_max > inst.n()) throw std::invalid_argument("xi_grid: k exceeds n");

  SpectralSummary summary;
  if (k_max > 0) summary = top_k_eigenpairs(inst, k_max);

  XiGrid grid;
  grid.Ms = Ms;
  grid.ks = ks;
  grid.cells.reserve(Ms.size() * ks.size());
  for (const std::size_t k : ks)
    for (const double M : Ms) {
      const QuboInstance q = augment(inst, summary, TransformConfig{M, k});
      WalkConfig cell_cfg = cfg;
      cell_cfg.seed = rng::seed_mixer(cfg.seed).mix(M).mix(static_cast<std::uint64_t>(k)).value();
      grid.cells.push_back(random_walk_autocorrelation(q, cell_cfg));
    }
  return grid;
}

/// Table layout: header row of M values, first column of k values.
inline void write_xi_grid_csv(std::ostream& os, const XiGrid& grid) {
  os << "k\\M";
  for (const double M : grid.Ms) os << ',' << format_double(M);
  os << '\n';
  for (std::size_t ki = 0; ki < grid.ks.size(); ++ki) {
    os << grid.ks[ki];
    for (std::size_t mi = 0; mi < grid.Ms.size(); ++mi) {
      const auto& cell = grid.at(ki, mi);
      os << ',' << (cell.xi ? format_double(*cell.xi) : std::string("nan"));
    }
    os << '\n';
  }
}

}  // namespace qubo
