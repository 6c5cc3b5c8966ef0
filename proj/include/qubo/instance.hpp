#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qubo {

/// A binary assignment of length n. Entries are 0 or 1.
using bitvec = std::vector<std::uint8_t>;

/**
 * A QUBO instance: maximize x^t Q x + offset over binary x.
 *
 * Q is dense, row-major and kept exactly symmetric by construction; all
 * mutators write both mirror entries. The offset carries constants dropped
 * by reductions so reported objective values stay comparable to the source
 * problem. Instances are treated as immutable once shared across threads.
 */
class QuboInstance {
 public:
  explicit QuboInstance(std::size_t n, std::string name = "")
      : n_(n), offset_(0.0), name_(std::move(name)), q_(n * n, 0.0) {
    if (n == 0) throw std::invalid_argument("QuboInstance: n must be >= 1");
  }

  /// Builds from a row-major dense matrix, validating symmetry and finiteness.
  static QuboInstance from_dense(std::size_t n, const std::vector<double>& dense,
                                 double offset = 0.0, std::string name = "") {
    QuboInstance inst(n, std::move(name));
    if (dense.size() != n * n)
      throw std::invalid_argument("QuboInstance: dense data size does not match n*n");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double v = dense[i * n + j];
        if (!std::isfinite(v))
          throw std::invalid_argument("QuboInstance: non-finite coefficient");
        if (dense[j * n + i] != v)
          throw std::invalid_argument("QuboInstance: matrix is not symmetric");
      }
    inst.q_ = dense;
    inst.offset_ = offset;
    return inst;
  }

  std::size_t n() const noexcept { return n_; }
  double offset() const noexcept { return offset_; }
  const std::string& name() const noexcept { return name_; }

  void set_offset(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("QuboInstance: non-finite offset");
    offset_ = v;
  }
  void set_name(std::string name) { name_ = std::move(name); }

  double at(std::size_t i, std::size_t j) const { return q_[i * n_ + j]; }

  /// Sets q[i][j] and q[j][i].
  void set(std::size_t i, std::size_t j, double v) {
    check_ij(i, j);
    if (!std::isfinite(v)) throw std::invalid_argument("QuboInstance: non-finite coefficient");
    q_[i * n_ + j] = v;
    q_[j * n_ + i] = v;
  }

  /// Adds v to q[i][j] and q[j][i] (once to the diagonal when i == j).
  void add(std::size_t i, std::size_t j, double v) {
    check_ij(i, j);
    if (!std::isfinite(v)) throw std::invalid_argument("QuboInstance: non-finite coefficient");
    q_[i * n_ + j] += v;
    if (i != j) q_[j * n_ + i] = q_[i * n_ + j];
  }

  const double* row(std::size_t i) const { return q_.data() + i * n_; }
  const std::vector<double>& data() const noexcept { return q_; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += q_[i * n_ + i];
    return t;
  }

  /// Structural equality: same dimension, coefficients and offset. Names are
  /// labels, not identity, and are ignored.
  friend bool operator==(const QuboInstance& a, const QuboInstance& b) {
    return a.n_ == b.n_ && a.offset_ == b.offset_ && a.q_ == b.q_;
  }

 private:
  void check_ij(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw std::invalid_argument("QuboInstance: index out of range");
  }

  std::size_t n_;
  double offset_;
  std::string name_;
  std::vector<double> q_;
};

namespace detail {

inline void check_assignment(const QuboInstance& inst, const bitvec& x) {
  if (x.size() != inst.n())
    throw std::invalid_argument("evaluate: assignment length does not match instance");
  for (const auto v : x)
    if (v != 0 && v != 1) throw std::invalid_argument("evaluate: assignment entry not in {0,1}");
}

/// x^t Q x + offset without precondition checks.
inline double evaluate_unchecked(const QuboInstance& inst, const bitvec& x) {
  const std::size_t n = inst.n();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!x[i]) continue;
    const double* qi = inst.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (x[j]) acc += qi[j];
    total += acc;
  }
  return total + inst.offset();
}

}  // namespace detail

/// Full objective x^t Q x + offset. Diagonal terms count once, each
/// off-diagonal pair twice through symmetry.
inline double evaluate(const QuboInstance& inst, const bitvec& x) {
  detail::check_assignment(inst, x);
  return detail::evaluate_unchecked(inst, x);
}

/// A binary assignment together with its objective value under a designated
/// instance.
struct Solution {
  bitvec x;
  double value = 0.0;

  friend bool operator==(const Solution& a, const Solution& b) = default;
};

inline Solution make_solution(const QuboInstance& inst, bitvec x) {
  Solution s;
  s.value = evaluate(inst, x);
  s.x = std::move(x);
  return s;
}

}  // namespace qubo
