#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qubo/instance.hpp"

namespace qubo {

/**
 * Incremental single-flip evaluation state.
 *
 * Maintains, for a current assignment x, the objective change gains[j] of
 * flipping each bit j, so a move can be scored in O(1) and applied in O(n).
 * The invariant is gains[j] == evaluate(flip(x, j)) - evaluate(x).
 *
 * Single-owner mutable: one search thread per state.
 */
class FlipGainState {
 public:
  FlipGainState(const QuboInstance& inst, bitvec x) : inst_(&inst) { reset(std::move(x)); }

  /// Re-seats the state on a new assignment. O(n^2).
  void reset(bitvec x) {
    detail::check_assignment(*inst_, x);
    x_ = std::move(x);
    const std::size_t n = inst_->n();
    gains_.assign(n, 0.0);
    value_ = detail::evaluate_unchecked(*inst_, x_);
    // gains[j] = (1 - 2 x_j) * (q_jj + 2 * sum_{i != j} q_ij x_i)
    for (std::size_t j = 0; j < n; ++j) {
      const double* qj = inst_->row(j);
      double coupled = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (x_[i] && i != j) coupled += qj[i];
      const double sigma = x_[j] ? -1.0 : 1.0;
      gains_[j] = sigma * (qj[j] + 2.0 * coupled);
    }
  }

  const QuboInstance& instance() const noexcept { return *inst_; }
  const bitvec& x() const noexcept { return x_; }
  const std::vector<double>& gains() const noexcept { return gains_; }
  double value() const noexcept { return value_; }
  std::size_t n() const noexcept { return inst_->n(); }

  /// Objective change of flipping bit j, O(1).
  double gain(std::size_t j) const { return gains_[j]; }

  /// Flips bit j, refreshing the cached objective and all gains in O(n).
  /// Returns the objective delta (the pre-move gain of j).
  double apply_flip(std::size_t j) {
    if (j >= x_.size()) throw std::invalid_argument("apply_flip: index out of range");
    const double delta = gains_[j];
    const double sigma_j = x_[j] ? -1.0 : 1.0;
    const double* qj = inst_->row(j);
    const std::size_t n = x_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double sigma_i = x_[i] ? -1.0 : 1.0;
      gains_[i] += 2.0 * sigma_i * sigma_j * qj[i];
    }
    gains_[j] = -delta;  // flipping back undoes the move
    x_[j] ^= 1u;
    value_ += delta;
    return delta;
  }

 private:
  const QuboInstance* inst_;
  bitvec x_;
  std::vector<double> gains_;
  double value_ = 0.0;
};

}  // namespace qubo
