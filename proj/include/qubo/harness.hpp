#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qubo/errors.hpp"
#include "qubo/format.hpp"
#include "qubo/instance.hpp"
#include "qubo/instances.hpp"
#include "qubo/rng.hpp"
#include "qubo/solver.hpp"
#include "qubo/spectral.hpp"
#include "qubo/version.hpp"

namespace qubo {

/// One generator line of an experiment config: `count` instances drawn from
/// consecutive seeds starting at spec.seed.
struct GeneratorRequest {
  GeneratorSpec spec;
  std::size_t count = 1;
};

/// A base-vs-transformed comparison protocol over an (M, k) grid.
struct ExperimentConfig {
  std::vector<std::string> instance_paths;
  std::vector<GeneratorRequest> generators;
  std::vector<double> M_grid;
  std::vector<std::size_t> k_grid;
  std::uint64_t evaluations = 0;
  double time_limit = 0.0;
  std::size_t repetitions = 1;
  std::uint64_t seed_base = 0;
  std::string output_dir;
  bool write_trajectory = false;
  std::size_t threads = 0;  ///< 0 = hardware concurrency
  std::size_t tabu_tenure = 0;
  std::size_t restart_stall = 500;
  std::size_t elite_size = 8;
};

/// Per-(instance, M, k) comparison outcome, repetition-averaged. Both bests
/// are under the original objective.
struct ComparisonRow {
  std::string instance;
  double M = 0.0;
  std::size_t k = 0;
  double base_best = 0.0;
  double transformed_best = 0.0;
  double improvement_abs = 0.0;
  std::optional<double> improvement_pct;  ///< absent when base_best == 0
};

/// Per-(M, k) averages across instances and repetitions.
struct ComparisonCell {
  double M = 0.0;
  std::size_t k = 0;
  double avg_improvement_abs = 0.0;
  std::optional<double> avg_improvement_pct;
  std::size_t rows = 0;
};

struct ComparisonResult {
  std::vector<ComparisonRow> rows;
  std::vector<ComparisonCell> summary;
  std::vector<std::string> errors;  ///< per-item failures; the run continues
};

/// Seed for one (instance, M, k, repetition) cell. Base and transformed runs
/// of a cell share it so the identity transform reproduces the base run
/// exactly.
inline std::uint64_t derive_cell_seed(std::uint64_t seed_base, const std::string& instance_name,
                                      double M, std::size_t k, std::size_t repetition) {
  return rng::seed_mixer(seed_base)
      .mix(instance_name)
      .mix(M)
      .mix(static_cast<std::uint64_t>(k))
      .mix(static_cast<std::uint64_t>(repetition))
      .value();
}

namespace detail {

inline std::optional<double> improvement_pct(double base, double transformed) {
  if (base == 0.0) return std::nullopt;
  return 100.0 * (transformed - base) / std::fabs(base);
}

/// Runs jobs [0, count) on up to `threads` workers. Each job writes only its
/// own result slot, so aggregation is order-independent.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Loads every instance named by the config. Unreadable or malformed sources
/// become error records instead of aborting the run.
inline std::vector<QuboInstance> load_experiment_instances(const ExperimentConfig& cfg,
                                                           std::vector<std::string>& errors) {
  std::vector<QuboInstance> instances;
  for (const auto& path : cfg.instance_paths) {
    std::ifstream in(path);
    if (!in) {
      errors.push_back("cannot open instance file: " + path);
      continue;
    }
    try {
      auto parsed = parse_orlib(in, std::filesystem::path(path).stem().string());
      for (auto& inst : parsed) instances.push_back(std::move(inst));
    } catch (const parse_error& e) {
      errors.push_back(path + ": " + e.what());
    }
  }
  for (const auto& req : cfg.generators) {
    for (std::size_t c = 0; c < req.count; ++c) {
      GeneratorSpec spec = req.spec;
      spec.seed = req.spec.seed + c;
      try {
        instances.push_back(generate(spec));
      } catch (const std::invalid_argument& e) {
        errors.push_back(std::string("generator: ") + e.what());
      }
    }
  }
  return instances;
}

/**
 * The comparison protocol: for every instance and (M, k) cell, run the
 * heuristic on the base and on the transformed matrix with identical budgets
 * and a shared per-cell seed, then aggregate improvements. Cells execute on
 * a bounded worker pool; results are deterministic regardless of scheduling
 * because every cell derives its own seed.
 */
inline ComparisonResult run_comparison(const ExperimentConfig& cfg) {
  if (cfg.M_grid.empty() || cfg.k_grid.empty())
    throw std::invalid_argument("run_comparison: empty (M, k) grid");
  if (cfg.repetitions < 1) throw std::invalid_argument("run_comparison: repetitions must be >= 1");
  if (cfg.evaluations == 0 && cfg.time_limit <= 0.0)
    throw std::invalid_argument("run_comparison: no budget set");

  ComparisonResult result;
  const std::vector<QuboInstance> instances = load_experiment_instances(cfg, result.errors);

  struct Job {
    const QuboInstance* inst = nullptr;
    const QuboInstance* transformed = nullptr;  // null for identity cells
    double M = 0.0;
    std::size_t k = 0;
    std::size_t rep = 0;
    double base_best = 0.0;
    double transformed_best = 0.0;
    bool failed = false;
    std::string error;
  };

  // One transformed matrix per (instance, M, k); eigenpairs once per instance.
  std::vector<std::unique_ptr<QuboInstance>> transformed_store;
  std::vector<Job> jobs;
  for (const auto& inst : instances) {
    const std::size_t k_max = *std::max_element(cfg.k_grid.begin(), cfg.k_grid.end());
    SpectralSummary summary;
    bool summary_ok = true;
    if (k_max > 0 && k_max <= inst.n()) {
      bool any_live = false;
      for (const double M : cfg.M_grid)
        if (M > 0.0) any_live = true;
      if (any_live) {
        try {
          summary = top_k_eigenpairs(inst, k_max);
        } catch (const convergence_error& e) {
          summary_ok = false;
          result.errors.push_back(inst.name() + ": " + e.what());
        }
      }
    }
    for (const double M : cfg.M_grid)
      for (const std::size_t k : cfg.k_grid) {
        if (k > inst.n()) {
          result.errors.push_back(inst.name() + ": k=" + std::to_string(k) + " exceeds n");
          continue;
        }
        const QuboInstance* transformed = nullptr;
        if (M > 0.0 && k > 0) {
          if (!summary_ok) continue;
          transformed_store.push_back(
              std::make_unique<QuboInstance>(augment(inst, summary, TransformConfig{M, k})));
          transformed = transformed_store.back().get();
        }
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
          Job job;
          job.inst = &inst;
          job.transformed = transformed;
          job.M = M;
          job.k = k;
          job.rep = rep;
          jobs.push_back(std::move(job));
        }
      }
  }

  detail::parallel_for(jobs.size(), cfg.threads, [&](std::size_t idx) {
    Job& job = jobs[idx];
    SolverConfig scfg;
    scfg.seed = derive_cell_seed(cfg.seed_base, job.inst->name(), job.M, job.k, job.rep);
    scfg.max_evaluations = cfg.evaluations;
    scfg.time_limit = cfg.time_limit;
    scfg.tabu_tenure = cfg.tabu_tenure;
    scfg.restart_stall = cfg.restart_stall;
    scfg.elite_size = cfg.elite_size;
    scfg.record_trajectory = false;
    try {
      const RunReport base_report = prlocal(*job.inst, scfg);
      const RunReport trans_report = prlocal(*job.inst, job.transformed, scfg);
      job.base_best = base_report.best_value_base;
      job.transformed_best = trans_report.best_value_base;
    } catch (const std::exception& e) {
      job.failed = true;
      job.error = e.what();
    }
  });

  // repetition-averaged rows, in (instance, M, k) job order
  for (std::size_t i = 0; i < jobs.size();) {
    const Job& first = jobs[i];
    if (first.failed) {
      result.errors.push_back(first.inst->name() + ": " + first.error);
      ++i;
      continue;
    }
    double base_sum = 0.0, trans_sum = 0.0;
    std::size_t reps = 0;
    std::size_t j = i;
    for (; j < jobs.size() && jobs[j].inst == first.inst && jobs[j].M == first.M &&
           jobs[j].k == first.k;
         ++j) {
      if (jobs[j].failed) {
        result.errors.push_back(jobs[j].inst->name() + ": " + jobs[j].error);
        continue;
      }
      base_sum += jobs[j].base_best;
      trans_sum += jobs[j].transformed_best;
      ++reps;
    }
    if (reps > 0) {
      ComparisonRow row;
      row.instance = first.inst->name();
      row.M = first.M;
      row.k = first.k;
      row.base_best = base_sum / static_cast<double>(reps);
      row.transformed_best = trans_sum / static_cast<double>(reps);
      row.improvement_abs = row.transformed_best - row.base_best;
      row.improvement_pct = detail::improvement_pct(row.base_best, row.transformed_best);
      result.rows.push_back(std::move(row));
    }
    i = j;
  }

  std::sort(result.rows.begin(), result.rows.end(), [](const auto& a, const auto& b) {
    if (a.instance != b.instance) return a.instance < b.instance;
    if (a.M != b.M) return a.M < b.M;
    return a.k < b.k;
  });

  // per-(M, k) averages across instances
  for (const double M : cfg.M_grid)
    for (const std::size_t k : cfg.k_grid) {
      ComparisonCell cell;
      cell.M = M;
      cell.k = k;
      double abs_sum = 0.0, pct_sum = 0.0;
      std::size_t pct_count = 0;
      for (const auto& row : result.rows) {
        if (row.M != M || row.k != k) continue;
        abs_sum += row.improvement_abs;
        ++cell.rows;
        if (row.improvement_pct) {
          pct_sum += *row.improvement_pct;
          ++pct_count;
        }
      }
      if (cell.rows == 0) continue;
      cell.avg_improvement_abs = abs_sum / static_cast<double>(cell.rows);
      if (pct_count > 0) cell.avg_improvement_pct = pct_sum / static_cast<double>(pct_count);
      result.summary.push_back(cell);
    }
  return result;
}

inline void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "instance,M,k,base_best,transformed_best,improvement_abs,improvement_pct\n";
  for (const auto& r : rows) {
    os << r.instance << ',' << format_double(r.M) << ',' << r.k << ','
       << format_double(r.base_best) << ',' << format_double(r.transformed_best) << ','
       << format_double(r.improvement_abs) << ','
       << (r.improvement_pct ? format_double(*r.improvement_pct) : std::string("nan")) << '\n';
  }
}

inline void write_summary_csv(std::ostream& os, const std::vector<ComparisonCell>& cells) {
  os << "M,k,avg_improvement_abs,avg_improvement_pct,rows\n";
  for (const auto& c : cells) {
    os << format_double(c.M) << ',' << c.k << ',' << format_double(c.avg_improvement_abs) << ','
       << (c.avg_improvement_pct ? format_double(*c.avg_improvement_pct) : std::string("nan"))
       << ',' << c.rows << '\n';
  }
}

/// Full-spectrum histogram of an instance.
struct SpectrumReport {
  std::vector<double> eigenvalues;  ///< descending by signed value
  std::vector<std::size_t> bin_counts;
  std::vector<double> bin_edges;  ///< bin_counts.size() + 1 edges
  double max_abs = 0.0;
  double second_abs = 0.0;
  double dominance_ratio = 0.0;  ///< max_abs / second_abs (inf-safe: 0 when n < 2)
};

/// 50 equal-width bins across [min eigenvalue, max eigenvalue].
inline SpectrumReport run_spectrum_report(const QuboInstance& inst, std::size_t bins = 50) {
  SpectrumReport report;
  report.eigenvalues = full_spectrum(inst);
  const auto& ev = report.eigenvalues;
  const double hi = ev.front(), lo = ev.back();

  report.bin_counts.assign(bins, 0);
  report.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b)
    report.bin_edges[b] = lo + width * static_cast<double>(b);
  report.bin_edges[bins] = hi;
  for (const double v : ev) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    if (b >= bins) b = bins - 1;
    ++report.bin_counts[b];
  }

  std::vector<double> by_abs = ev;
  std::sort(by_abs.begin(), by_abs.end(),
            [](double a, double b) { return std::fabs(a) > std::fabs(b); });
  report.max_abs = std::fabs(by_abs[0]);
  if (by_abs.size() > 1) {
    report.second_abs = std::fabs(by_abs[1]);
    if (report.second_abs > 0.0) report.dominance_ratio = report.max_abs / report.second_abs;
  }
  return report;
}

inline void write_histogram_csv(std::ostream& os, const SpectrumReport& report) {
  os << "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < report.bin_counts.size(); ++b)
    os << format_double(report.bin_edges[b]) << ',' << format_double(report.bin_edges[b + 1])
       << ',' << report.bin_counts[b] << '\n';
}

/**
 * Parses the flat key-value experiment config format: one `key value...`
 * pair per line, '#' starts a comment. Keys: instance, generate, M, k,
 * evals, time_limit, repetitions, seed, output, trajectory, threads,
 * tenure, stall, elite.
 */
inline ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    try {
      if (key == "instance") {
        std::string path;
        if (!(ls >> path)) throw std::invalid_argument("missing path");
        cfg.instance_paths.push_back(path);
      } else if (key == "generate") {
        GeneratorRequest req;
        std::string kv;
        while (ls >> kv) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value, got '" + kv + "'");
          const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
          if (k == "family") req.spec.family = family_from_name(v);
          else if (k == "n") req.spec.n = static_cast<std::size_t>(parse_int(v));
          else if (k == "density") req.spec.density = parse_double(v);
          else if (k == "low") req.spec.coeff_low = parse_int(v);
          else if (k == "high") req.spec.coeff_high = parse_int(v);
          else if (k == "seed") req.spec.seed = static_cast<std::uint64_t>(parse_int(v));
          else if (k == "count") req.count = static_cast<std::size_t>(parse_int(v));
          else throw std::invalid_argument("unknown generator key '" + k + "'");
        }
        if (req.spec.n == 0) throw std::invalid_argument("generator needs n=...");
        cfg.generators.push_back(req);
      } else if (key == "M" || key == "k") {
        std::string rest, tok;
        std::getline(ls, rest);
        std::istringstream items(rest);
        while (std::getline(items, tok, ',')) {
          std::istringstream ts(tok);
          std::string w;
          while (ts >> w) {
            if (key == "M") cfg.M_grid.push_back(parse_double(w));
            else cfg.k_grid.push_back(static_cast<std::size_t>(parse_int(w)));
          }
        }
      } else {
        std::string value;
        if (!(ls >> value)) throw std::invalid_argument("missing value");
        if (key == "evals") cfg.evaluations = static_cast<std::uint64_t>(parse_int(value));
        else if (key == "time_limit") cfg.time_limit = parse_double(value);
        else if (key == "repetitions") cfg.repetitions = static_cast<std::size_t>(parse_int(value));
        else if (key == "seed") cfg.seed_base = static_cast<std::uint64_t>(parse_int(value));
        else if (key == "output") cfg.output_dir = value;
        else if (key == "trajectory") cfg.write_trajectory = parse_int(value) != 0;
        else if (key == "threads") cfg.threads = static_cast<std::size_t>(parse_int(value));
        else if (key == "tenure") cfg.tabu_tenure = static_cast<std::size_t>(parse_int(value));
        else if (key == "stall") cfg.restart_stall = static_cast<std::size_t>(parse_int(value));
        else if (key == "elite") cfg.elite_size = static_cast<std::size_t>(parse_int(value));
        else throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw parse_error(lineno, e.what());
    }
  }
  return cfg;
}

/// Plain-text manifest: version plus the key-value pairs that reproduce a
/// run. Contains nothing non-deterministic.
inline void write_manifest(std::ostream& os,
                           const std::vector<std::pair<std::string, std::string>>& entries) {
  os << "tool qubo-toolkit\n";
  os << "version " << version << '\n';
  for (const auto& [k, v] : entries) os << k << ' ' << v << '\n';
}

}  // namespace qubo
