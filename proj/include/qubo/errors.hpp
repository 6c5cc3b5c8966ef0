#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qubo {

/// Malformed input data. Carries the 1-based line number when known.
class parse_error : public std::runtime_error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  explicit parse_error(const std::string& what) : std::runtime_error(what), line_(0) {}

  /// 1-based line number of the offending input, 0 if not attributable.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Eigensolver failed to converge within its sweep budget.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double worst_residual)
      : std::runtime_error(what), worst_residual_(worst_residual) {}

  /// Largest remaining off-diagonal magnitude at the point of failure.
  double worst_residual() const noexcept { return worst_residual_; }

 private:
  double worst_residual_;
};

}  // namespace qubo
