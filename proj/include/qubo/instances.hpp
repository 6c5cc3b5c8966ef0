#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qubo/errors.hpp"
#include "qubo/format.hpp"
#include "qubo/instance.hpp"
#include "qubo/rng.hpp"

namespace qubo {

/**
 * A maximum diversity problem: choose m of n elements maximizing the sum of
 * pairwise distances, max sum_{i != j} d_ij x_i x_j subject to sum x_i = m.
 * The distance matrix is symmetric, non-negative, zero on the diagonal.
 */
struct MdpInstance {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> d;  // row-major n x n
  std::string name;

  double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

inline MdpInstance make_mdp(std::size_t n, std::size_t m, std::vector<double> d,
                            std::string name = "") {
  if (n < 1) throw std::invalid_argument("MdpInstance: n must be >= 1");
  if (m < 1 || m > n) throw std::invalid_argument("MdpInstance: m must be in [1, n]");
  if (d.size() != n * n) throw std::invalid_argument("MdpInstance: bad distance matrix size");
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i * n + i] != 0.0) throw std::invalid_argument("MdpInstance: nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d[i * n + j];
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("MdpInstance: distances must be finite and non-negative");
      if (d[j * n + i] != v) throw std::invalid_argument("MdpInstance: asymmetric distances");
    }
  }
  MdpInstance mdp;
  mdp.n = n;
  mdp.m = m;
  mdp.d = std::move(d);
  mdp.name = std::move(name);
  return mdp;
}

/// Instance families the generator can produce.
enum class InstanceFamily { orlib_like, palubeckis_like, dominant_eig };

inline const char* family_name(InstanceFamily f) {
  switch (f) {
    case InstanceFamily::orlib_like: return "orlib-like";
    case InstanceFamily::palubeckis_like: return "palubeckis-like";
    case InstanceFamily::dominant_eig: return "dominant-eig";
  }
  return "?";
}

inline InstanceFamily family_from_name(const std::string& s) {
  if (s == "orlib-like") return InstanceFamily::orlib_like;
  if (s == "palubeckis-like") return InstanceFamily::palubeckis_like;
  if (s == "dominant-eig") return InstanceFamily::dominant_eig;
  throw std::invalid_argument("unknown instance family: '" + s + "'");
}

/// Random-instance recipe. Bit-reproducible per (spec, seed).
struct GeneratorSpec {
  std::size_t n = 0;
  double density = 0.1;  // probability that an upper-triangle cell is drawn
  long long coeff_low = -100;
  long long coeff_high = 100;
  std::uint64_t seed = 0;
  InstanceFamily family = InstanceFamily::orlib_like;
};

namespace detail {

// Line-oriented whitespace tokenizer that remembers the source line of every
// token, so parse errors can point at the offending line.
struct TokenStream {
  std::vector<std::string> tokens;
  std::vector<std::size_t> lines;
  std::size_t pos = 0;
  std::size_t last_line = 1;

  explicit TokenStream(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) {
        tokens.push_back(tok);
        lines.push_back(lineno);
      }
      last_line = lineno;
    }
    if (lineno == 0) last_line = 1;
  }

  bool done() const { return pos >= tokens.size(); }
  std::size_t remaining() const { return tokens.size() - pos; }
  std::size_t line_here() const { return done() ? last_line : lines[pos]; }

  const std::string& next(const char* what) {
    if (done()) throw parse_error(last_line, std::string("unexpected end of input, expected ") + what);
    return tokens[pos++];
  }

  long long next_int(const char* what) {
    const std::size_t ln = line_here();
    const std::string& tok = next(what);
    try {
      return parse_int(tok);
    } catch (const std::invalid_argument&) {
      throw parse_error(ln, std::string("expected ") + what + ", got '" + tok + "'");
    }
  }

  double next_double(const char* what) {
    const std::size_t ln = line_here();
    const std::string& tok = next(what);
    try {
      return parse_double(tok);
    } catch (const std::invalid_argument&) {
      throw parse_error(ln, std::string("expected ") + what + ", got '" + tok + "'");
    }
  }
};

}  // namespace detail

/**
 * Parses an ORLIB-style multi-instance stream:
 *   line 1: instance count P
 *   per instance: "n nz" header, then nz triplets "i j v" (1-based indices).
 * Each triplet sets q[i-1][j-1] = q[j-1][i-1] = v; unspecified entries stay 0.
 * Objective sense is maximize; minimizing inputs must be negated upstream.
 * Instances are named "<name_prefix>#<index>".
 */
inline std::vector<QuboInstance> parse_orlib(std::istream& in,
                                             const std::string& name_prefix = "instance") {
  detail::TokenStream ts(in);
  const long long count = ts.next_int("instance count");
  if (count < 0) throw parse_error(ts.last_line, "negative instance count");

  std::vector<QuboInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long long idx = 1; idx <= count; ++idx) {
    std::size_t header_line = ts.line_here();
    const long long n = ts.next_int("variable count");
    const long long nz = ts.next_int("nonzero count");
    if (n < 1) throw parse_error(header_line, "variable count must be >= 1");
    if (nz < 0) throw parse_error(header_line, "negative nonzero count");

    QuboInstance inst(static_cast<std::size_t>(n),
                      name_prefix + "#" + std::to_string(idx));
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
    for (long long t = 0; t < nz; ++t) {
      const std::size_t ln = ts.line_here();
      const long long i = ts.next_int("row index");
      const long long j = ts.next_int("column index");
      const double v = ts.next_double("coefficient");
      if (i < 1 || i > n || j < 1 || j > n)
        throw parse_error(ln, "index out of range (1.." + std::to_string(n) + ")");
      const std::size_t a = static_cast<std::size_t>(std::min(i, j)) - 1;
      const std::size_t b = static_cast<std::size_t>(std::max(i, j)) - 1;
      if (seen[a * static_cast<std::size_t>(n) + b])
        throw parse_error(ln, "duplicate entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
      seen[a * static_cast<std::size_t>(n) + b] = 1;
      inst.set(a, b, v);
    }
    out.push_back(std::move(inst));
  }
  if (!ts.done())
    throw parse_error(ts.line_here(), "trailing data after last declared instance");
  return out;
}

/// Writes the exact grammar parse_orlib accepts. Offsets are not part of the
/// format and are not written; callers that care record them in a manifest.
inline void write_orlib(std::ostream& os, const std::vector<QuboInstance>& instances) {
  os << instances.size() << '\n';
  for (const auto& inst : instances) {
    const std::size_t n = inst.n();
    std::size_t nz = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        if (inst.at(i, j) != 0.0) ++nz;
    os << n << ' ' << nz << '\n';
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        if (inst.at(i, j) != 0.0)
          os << (i + 1) << ' ' << (j + 1) << ' ' << format_double(inst.at(i, j)) << '\n';
  }
}

inline void write_orlib(std::ostream& os, const QuboInstance& instance) {
  write_orlib(os, std::vector<QuboInstance>{instance});
}

/**
 * Parses an MDPLIB-style stream: "n m" header, then either
 *   - triplets "i j d" covering every pair exactly once (0- or 1-based,
 *     autodetected from the minimum index), or
 *   - a dense strict-upper-triangle row stream of n(n-1)/2 distances.
 */
inline MdpInstance parse_mdplib(std::istream& in, const std::string& name = "") {
  detail::TokenStream ts(in);
  const std::size_t header_line = ts.line_here();
  const long long n_ll = ts.next_int("element count");
  const long long m_ll = ts.next_int("subset size");
  if (n_ll < 1) throw parse_error(header_line, "element count must be >= 1");
  if (m_ll < 1 || m_ll > n_ll) throw parse_error(header_line, "subset size out of range");
  const std::size_t n = static_cast<std::size_t>(n_ll);
  const std::size_t pairs = n * (n - 1) / 2;

  std::vector<double> d(n * n, 0.0);
  const std::size_t rem = ts.remaining();
  if (rem == 3 * pairs && pairs > 0) {
    // Triplet form. Scan indices first to detect the base.
    long long min_index = std::numeric_limits<long long>::max();
    for (std::size_t t = 0; t < pairs; ++t) {
      const std::string& a = ts.tokens[ts.pos + 3 * t];
      const std::string& b = ts.tokens[ts.pos + 3 * t + 1];
      try {
        min_index = std::min({min_index, parse_int(a), parse_int(b)});
      } catch (const std::invalid_argument&) {
        throw parse_error(ts.lines[ts.pos + 3 * t], "expected index, got '" + a + "' / '" + b + "'");
      }
    }
    const long long base = min_index == 0 ? 0 : 1;
    std::vector<std::uint8_t> seen(n * n, 0);
    for (std::size_t t = 0; t < pairs; ++t) {
      const std::size_t ln = ts.line_here();
      const long long i = ts.next_int("row index") - base;
      const long long j = ts.next_int("column index") - base;
      const double v = ts.next_double("distance");
      if (i < 0 || j < 0 || i >= n_ll || j >= n_ll)
        throw parse_error(ln, "index out of range");
      if (i == j) throw parse_error(ln, "distance to self must be omitted");
      const std::size_t a = static_cast<std::size_t>(std::min(i, j));
      const std::size_t b = static_cast<std::size_t>(std::max(i, j));
      if (seen[a * n + b]) {
        if (d[a * n + b] != v) throw parse_error(ln, "conflicting values for a symmetric pair");
        throw parse_error(ln, "duplicate pair");
      }
      seen[a * n + b] = 1;
      d[a * n + b] = d[b * n + a] = v;
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (!seen[a * n + b])
          throw parse_error(ts.last_line,
                            "missing entry for pair (" + std::to_string(a) + "," + std::to_string(b) + ")");
  } else if (rem == pairs) {
    // Dense strict upper triangle, row by row.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = ts.next_double("distance");
        d[i * n + j] = d[j * n + i] = v;
      }
  } else {
    throw parse_error(ts.last_line,
                      "expected " + std::to_string(3 * pairs) + " triplet tokens or " +
                          std::to_string(pairs) + " dense distances, found " + std::to_string(rem));
  }

  try {
    return make_mdp(n, static_cast<std::size_t>(m_ll), std::move(d), name);
  } catch (const std::invalid_argument& e) {
    throw parse_error(ts.last_line, e.what());
  }
}

/// Writes the triplet form parse_mdplib accepts (0-based, all pairs).
inline void write_mdplib(std::ostream& os, const MdpInstance& mdp) {
  os << mdp.n << ' ' << mdp.m << '\n';
  for (std::size_t i = 0; i < mdp.n; ++i)
    for (std::size_t j = i + 1; j < mdp.n; ++j)
      os << i << ' ' << j << ' ' << format_double(mdp.at(i, j)) << '\n';
}

/**
 * Draws a random instance. Upper-triangle cells (diagonal included) are
 * populated with probability `density`, values uniform integers in
 * [coeff_low, coeff_high]. The dominant-eig family additionally plants a
 * rank-1 term beta * u u^t (beta = -5 * coeff_high, u a random unit vector),
 * giving the spectrum one far-out negative eigenvalue the way penalty-reduced
 * diversity instances have.
 */
inline QuboInstance generate(const GeneratorSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("generate: n must be >= 1");
  if (!(spec.density > 0.0 && spec.density <= 1.0))
    throw std::invalid_argument("generate: density must be in (0, 1]");
  if (spec.coeff_low > spec.coeff_high)
    throw std::invalid_argument("generate: coeff_low must be <= coeff_high");

  rng::engine gen(spec.seed);
  QuboInstance inst(spec.n, std::string(family_name(spec.family)) + "_n" +
                                std::to_string(spec.n) + "_s" + std::to_string(spec.seed));
  for (std::size_t i = 0; i < spec.n; ++i)
    for (std::size_t j = i; j < spec.n; ++j)
      if (rng::bernoulli(gen, spec.density))
        inst.set(i, j, static_cast<double>(rng::uniform_int(gen, spec.coeff_low, spec.coeff_high)));

  if (spec.family == InstanceFamily::dominant_eig) {
    std::vector<double> u(spec.n);
    double norm_sq = 0.0;
    for (auto& v : u) {
      v = rng::standard_normal(gen);
      norm_sq += v * v;
    }
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (auto& v : u) v *= inv_norm;
    const double beta = -5.0 * static_cast<double>(spec.coeff_high);
    for (std::size_t i = 0; i < spec.n; ++i)
      for (std::size_t j = i; j < spec.n; ++j) inst.add(i, j, beta * u[i] * u[j]);
  }
  return inst;
}

/**
 * Quadratic-penalty reduction of an MDP to QUBO:
 *   off-diagonal q[i][j] = d[i][j] - P, diagonal q[i][i] = P (2m - 1),
 *   offset = -P m^2,
 * so that x^t Q x + offset = sum_{i != j} d_ij x_i x_j - P (sum x_i - m)^2
 * for every binary x. P large enough makes every optimum satisfy the
 * cardinality constraint exactly.
 */
inline QuboInstance mdp_to_qubo(const MdpInstance& mdp, double penalty) {
  if (!(penalty >= 0.0) || !std::isfinite(penalty))
    throw std::invalid_argument("mdp_to_qubo: P must be finite and non-negative");
  QuboInstance inst(mdp.n, mdp.name.empty()
                               ? ""
                               : mdp.name + "_P" + format_double(penalty));
  const double md = static_cast<double>(mdp.m);
  for (std::size_t i = 0; i < mdp.n; ++i) {
    inst.set(i, i, penalty * (2.0 * md - 1.0));
    for (std::size_t j = i + 1; j < mdp.n; ++j) inst.set(i, j, mdp.at(i, j) - penalty);
  }
  inst.set_offset(-penalty * md * md);
  return inst;
}

}  // namespace qubo
