#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qubo/flip_gains.hpp"
#include "qubo/instance.hpp"
#include "qubo/rng.hpp"

namespace qubo {

/**
 * Search budgets and tabu parameters.
 *
 * An "evaluation" is one applied flip move; it is the unit the tabu clock,
 * the stall counter and the budget all tick in. Evaluation budgets make runs
 * bit-reproducible; a wall-clock budget is honored but marks the report
 * non-deterministic.
 */
struct SolverConfig {
  std::uint64_t seed = 0;
  double time_limit = 0.0;            ///< seconds; 0 disables
  std::uint64_t max_evaluations = 0;  ///< flip moves; 0 disables
  std::size_t tabu_tenure = 0;        ///< 0 selects max(10, n/50), capped at n-1
  std::size_t elite_size = 8;         ///< path-relinking pool size
  std::size_t restart_stall = 500;    ///< non-improving moves before a restart
  bool record_trajectory = true;
  bool record_moves = false;  ///< keep a move log (debug/verification only)
};

/// One entry of the optional move log.
struct MoveRecord {
  std::uint64_t eval = 0;  ///< evaluation index of the move (1-based)
  std::uint32_t var = 0;
  bool aspired = false;  ///< move was tabu but allowed by aspiration
};

/// Outcome of one solver run.
struct RunReport {
  Solution best_solution;         ///< value is under the original (score) matrix
  double best_value_base = 0.0;   ///< incumbent re-evaluated under the original Q
  double best_value_search = 0.0; ///< incumbent under the matrix actually searched
  std::uint64_t evaluations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t relink_calls = 0;
  double wall_time = 0.0;  ///< seconds
  std::uint64_t seed = 0;
  bool deterministic = true;  ///< false when a wall-clock budget participated
  /// (evaluation count, incumbent value) at every incumbent improvement.
  std::vector<std::pair<std::uint64_t, double>> trajectory;
  std::vector<MoveRecord> moves;
  /// Evaluation counts at which episodes began (the tabu list resets there).
  /// Populated only when record_moves is set.
  std::vector<std::uint64_t> episode_starts;
};

/// Exact maximum by Gray-code enumeration. Ties prefer the lexicographically
/// smallest assignment. Guarded to n <= 25.
inline Solution brute_force(const QuboInstance& inst) {
  const std::size_t n = inst.n();
  if (n > 25)
    throw std::invalid_argument("brute_force: n = " + std::to_string(n) +
                                " exceeds the enumeration guard (25)");
  FlipGainState state(inst, bitvec(n, 0));
  Solution best{state.x(), state.value()};
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    // successive Gray codes differ in bit ctz(i)
    const int j = std::countr_zero(i);
    state.apply_flip(static_cast<std::size_t>(j));
    const double v = state.value();
    if (v > best.value ||
        (v == best.value &&
         std::lexicographical_compare(state.x().begin(), state.x().end(), best.x.begin(),
                                      best.x.end()))) {
      best.x = state.x();
      best.value = v;
    }
  }
  best.value = evaluate(inst, best.x);  // exact, clears incremental drift
  return best;
}

/**
 * Greedy path relinking: walks from `a` toward `b`, always flipping the
 * still-differing bit with the best gain on the search matrix (ties to the
 * lowest index), and returns the best solution met on the path under the
 * score matrix, endpoints included. Performs exactly Hamming(a, b) flips.
 * When `visited_values` is given it receives the score value of every
 * solution on the path, endpoints included.
 */
inline Solution path_relink(const Solution& a, const Solution& b,
                            const QuboInstance& search_inst, const QuboInstance& score_inst,
                            std::vector<double>* visited_values = nullptr) {
  if (search_inst.n() != score_inst.n())
    throw std::invalid_argument("path_relink: instance dimensions differ");
  if (a.x.size() != b.x.size() || a.x.size() != search_inst.n())
    throw std::invalid_argument("path_relink: endpoint lengths do not match the instances");
  if (a.x == b.x) throw std::invalid_argument("path_relink: identical endpoints");

  FlipGainState search(search_inst, a.x);
  FlipGainState score(score_inst, a.x);
  std::vector<std::size_t> diff;
  for (std::size_t i = 0; i < a.x.size(); ++i)
    if (a.x[i] != b.x[i]) diff.push_back(i);

  bitvec best_x = score.x();
  double best_value = score.value();
  if (visited_values) {
    visited_values->clear();
    visited_values->push_back(score.value());
  }
  while (!diff.empty()) {
    std::size_t pick = 0;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < diff.size(); ++t) {
      const double g = search.gain(diff[t]);
      if (g > best_gain) {
        best_gain = g;
        pick = t;
      }
    }
    search.apply_flip(diff[pick]);
    score.apply_flip(diff[pick]);
    diff.erase(diff.begin() + static_cast<std::ptrdiff_t>(pick));
    if (visited_values) visited_values->push_back(score.value());
    if (score.value() > best_value) {
      best_value = score.value();
      best_x = score.x();
    }
  }
  Solution out;
  out.value = evaluate(score_inst, best_x);
  out.x = std::move(best_x);
  return out;
}

namespace detail {

/**
 * Shared engine behind tabu_search and prlocal. Moves are chosen by gain on
 * the search matrix; the incumbent is tracked under the score matrix over
 * every visited solution. Episodes start from a fresh random assignment and
 * end when `restart_stall` moves pass without improving the episode's best
 * search value.
 */
class SearchDriver {
 public:
  SearchDriver(const QuboInstance& search_inst, const QuboInstance& score_inst,
               const SolverConfig& cfg)
      : search_inst_(search_inst),
        score_inst_(score_inst),
        cfg_(cfg),
        gen_(cfg.seed),
        search_(search_inst, bitvec(search_inst.n(), 0)),
        score_(score_inst, bitvec(score_inst.n(), 0)) {
    if (search_inst.n() != score_inst.n())
      throw std::invalid_argument("solver: search and score instances differ in size");
    if (cfg.max_evaluations == 0 && cfg.time_limit <= 0.0)
      throw std::invalid_argument("solver: no budget set (evaluations or time limit)");
    if (cfg.time_limit < 0.0) throw std::invalid_argument("solver: negative time limit");
    if (cfg.elite_size < 1) throw std::invalid_argument("solver: elite_size must be >= 1");
    if (cfg.restart_stall < 1) throw std::invalid_argument("solver: restart_stall must be >= 1");
    const std::size_t n = search_inst.n();
    tenure_ = cfg.tabu_tenure != 0 ? cfg.tabu_tenure : std::max<std::size_t>(10, n / 50);
    tenure_ = std::min(tenure_, n - 1);  // keep at least one variable admissible
    tabu_until_.assign(n, 0);
    report_.seed = cfg.seed;
    report_.deterministic = cfg.time_limit <= 0.0;
  }

  RunReport run(bool with_relinking) {
    start_ = std::chrono::steady_clock::now();
    bool first = true;
    while (budget_left()) {
      if (!first) ++report_.restarts;
      first = false;
      run_episode();
      if (with_relinking) maybe_relink();
    }
    report_.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    report_.best_value_base = evaluate(score_inst_, best_x_);
    report_.best_value_search = evaluate(search_inst_, best_x_);
    report_.best_solution = Solution{best_x_, report_.best_value_base};
    return std::move(report_);
  }

 private:
  bool budget_left() {
    if (cfg_.max_evaluations > 0 && report_.evaluations >= cfg_.max_evaluations) return false;
    if (cfg_.time_limit > 0.0) {
      if ((report_.evaluations & 0x3f) == 0) {
        const auto now = std::chrono::steady_clock::now();
        time_up_ = std::chrono::duration<double>(now - start_).count() >= cfg_.time_limit;
      }
      if (time_up_) return false;
    }
    return true;
  }

  void note_visit() {
    if (score_.value() > best_score_) {
      best_score_ = score_.value();
      best_x_ = score_.x();
      if (cfg_.record_trajectory) report_.trajectory.emplace_back(report_.evaluations, best_score_);
    }
    if (search_.value() > best_search_) best_search_ = search_.value();
  }

  /// Flips bit j in both states and advances the evaluation clock.
  void apply_move(std::size_t j) {
    search_.apply_flip(j);
    score_.apply_flip(j);
    ++report_.evaluations;
    note_visit();
  }

  void run_episode() {
    const std::size_t n = search_inst_.n();
    bitvec x(n);
    for (auto& b : x) b = static_cast<std::uint8_t>(gen_() & 1u);
    search_.reset(x);
    score_.reset(std::move(x));
    std::fill(tabu_until_.begin(), tabu_until_.end(), std::uint64_t{0});
    if (cfg_.record_moves) report_.episode_starts.push_back(report_.evaluations);
    note_visit();

    double episode_best_search = search_.value();
    double episode_best_score = score_.value();
    bitvec episode_best_x = score_.x();
    std::size_t stall = 0;

    while (stall < cfg_.restart_stall && budget_left()) {
      const std::uint64_t next_eval = report_.evaluations + 1;
      const auto& gains = search_.gains();

      // best admissible move: non-tabu, or tabu but lifting the search
      // incumbent (aspiration); ties go to the lowest index
      std::size_t pick = n;
      double pick_gain = -std::numeric_limits<double>::infinity();
      bool pick_aspired = false;
      for (std::size_t j = 0; j < n; ++j) {
        const bool tabu = next_eval < tabu_until_[j];
        if (tabu && !(search_.value() + gains[j] > best_search_)) continue;
        if (gains[j] > pick_gain) {
          pick_gain = gains[j];
          pick = j;
          pick_aspired = tabu;
        }
      }
      if (pick == n) {
        // unreachable with tenure <= n-1; fall back to the oldest tabu move
        std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t j = 0; j < n; ++j)
          if (tabu_until_[j] < oldest) {
            oldest = tabu_until_[j];
            pick = j;
          }
        pick_aspired = true;
      }

      apply_move(pick);
      tabu_until_[pick] = report_.evaluations + tenure_;
      if (cfg_.record_moves)
        report_.moves.push_back({report_.evaluations, static_cast<std::uint32_t>(pick), pick_aspired});

      if (search_.value() > episode_best_search) {
        episode_best_search = search_.value();
        stall = 0;
      } else {
        ++stall;
      }
      if (score_.value() > episode_best_score) {
        episode_best_score = score_.value();
        episode_best_x = score_.x();
      }
    }

    episode_result_ = Solution{std::move(episode_best_x), 0.0};
    episode_result_.value = evaluate(score_inst_, episode_result_.x);
  }

  /// Elite-pool bookkeeping plus one relink per episode: the newest pool
  /// entry against a randomly chosen other member.
  void maybe_relink() {
    if (auto idx = pool_insert(episode_result_)) newest_ = *idx;
    if (pool_.size() < 2) return;

    std::size_t partner = rng::uniform_index(gen_, pool_.size() - 1);
    if (partner >= newest_) ++partner;
    ++report_.relink_calls;
    const Solution result = relink_walk(pool_[newest_], pool_[partner]);
    if (auto idx = pool_insert(result)) newest_ = *idx;
  }

  /// Budget-capped greedy corridor walk used inside prlocal. Visited
  /// solutions feed the incumbent like any other move.
  Solution relink_walk(const Solution& from, const Solution& to) {
    search_.reset(from.x);
    score_.reset(from.x);
    note_visit();
    std::vector<std::size_t> diff;
    for (std::size_t i = 0; i < from.x.size(); ++i)
      if (from.x[i] != to.x[i]) diff.push_back(i);

    bitvec best_x = score_.x();
    double best_value = score_.value();
    while (!diff.empty() && budget_left()) {
      std::size_t pick = 0;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < diff.size(); ++t)
        if (search_.gain(diff[t]) > best_gain) {
          best_gain = search_.gain(diff[t]);
          pick = t;
        }
      apply_move(diff[pick]);
      diff.erase(diff.begin() + static_cast<std::ptrdiff_t>(pick));
      if (score_.value() > best_value) {
        best_value = score_.value();
        best_x = score_.x();
      }
    }
    Solution out;
    out.value = evaluate(score_inst_, best_x);
    out.x = std::move(best_x);
    return out;
  }

  /// Keeps the best `elite_size` distinct assignments by score value.
  /// Returns the pool slot when s was inserted, nullopt otherwise.
  std::optional<std::size_t> pool_insert(const Solution& s) {
    for (const auto& e : pool_)
      if (e.x == s.x) return std::nullopt;
    if (pool_.size() < cfg_.elite_size) {
      pool_.push_back(s);
      return pool_.size() - 1;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < pool_.size(); ++i)
      if (pool_[i].value < pool_[worst].value) worst = i;
    if (s.value <= pool_[worst].value) return std::nullopt;
    pool_[worst] = s;
    return worst;
  }

  const QuboInstance& search_inst_;
  const QuboInstance& score_inst_;
  SolverConfig cfg_;
  rng::engine gen_;
  FlipGainState search_;
  FlipGainState score_;
  std::size_t tenure_ = 0;
  std::vector<std::uint64_t> tabu_until_;
  bool time_up_ = false;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

  bitvec best_x_;
  double best_score_ = -std::numeric_limits<double>::infinity();
  double best_search_ = -std::numeric_limits<double>::infinity();
  Solution episode_result_;
  std::vector<Solution> pool_;
  std::size_t newest_ = 0;
  RunReport report_;
};

}  // namespace detail

/**
 * Best-improvement tabu search with internal random restarts. Moves are
 * chosen by gain on search_inst; the reported incumbent is the best score
 * under score_inst across every visited solution. Pass the same instance
 * twice for a plain (untransformed) run.
 */
inline RunReport tabu_search(const QuboInstance& search_inst, const QuboInstance& score_inst,
                             const SolverConfig& cfg) {
  detail::SearchDriver driver(search_inst, score_inst, cfg);
  return driver.run(/*with_relinking=*/false);
}

/**
 * The full heuristic: tabu-search episodes over the transformed matrix when
 * one is given (the base matrix otherwise), an elite pool of the best
 * distinct solutions under the base objective, and a greedy path relink
 * between the newest pool entry and a random other member after each episode
 * that changed the pool.
 */
inline RunReport prlocal(const QuboInstance& base, const QuboInstance* transformed,
                         const SolverConfig& cfg) {
  if (transformed && transformed->n() != base.n())
    throw std::invalid_argument("prlocal: transformed instance size differs from base");
  detail::SearchDriver driver(transformed ? *transformed : base, base, cfg);
  return driver.run(/*with_relinking=*/true);
}

inline RunReport prlocal(const QuboInstance& base, const SolverConfig& cfg) {
  return prlocal(base, nullptr, cfg);
}

}  // namespace qubo
