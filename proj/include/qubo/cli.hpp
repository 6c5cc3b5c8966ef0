#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qubo/errors.hpp"
#include "qubo/format.hpp"
#include "qubo/harness.hpp"
#include "qubo/instance.hpp"
#include "qubo/instances.hpp"
#include "qubo/landscape.hpp"
#include "qubo/report_json.hpp"
#include "qubo/solver.hpp"
#include "qubo/spectral.hpp"
#include "qubo/version.hpp"

namespace qubo::cli {

namespace detail {

using manifest_entries = std::vector<std::pair<std::string, std::string>>;

inline QuboInstance load_instance(const std::string& path, std::size_t index) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  auto instances = parse_orlib(in, std::filesystem::path(path).stem().string());
  if (index < 1 || index > instances.size())
    throw std::runtime_error("instance index " + std::to_string(index) + " out of range (file has " +
                             std::to_string(instances.size()) + ")");
  return std::move(instances[index - 1]);
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << contents;
}

inline void write_manifest_for(const std::string& output_path, const manifest_entries& entries) {
  std::ostringstream os;
  write_manifest(os, entries);
  write_file(output_path + ".manifest", os.str());
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream items(s);
  std::string tok;
  while (std::getline(items, tok, ','))
    if (!tok.empty()) out.push_back(parse_double(tok));
  return out;
}

inline std::vector<std::size_t> parse_index_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::istringstream items(s);
  std::string tok;
  while (std::getline(items, tok, ','))
    if (!tok.empty()) out.push_back(static_cast<std::size_t>(parse_int(tok)));
  return out;
}

}  // namespace detail

/// Entry point behind the `qubo` binary; exposed so tests can drive the CLI
/// in-process.
inline int run(int argc, const char* const* argv) {
  CLI::App app{
      "QUBO toolkit: spectral preprocessing, tabu/path-relinking heuristic, "
      "landscape analysis and experiment harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  // ---- solve ----------------------------------------------------------
  std::string solve_path, solve_report;
  std::size_t solve_index = 1;
  bool solve_transform = false, solve_trajectory = false;
  double solve_M = 100.0;
  std::size_t solve_k = 1;
  std::uint64_t solve_seed = 0, solve_evals = 0;
  double solve_time = 0.0;
  std::size_t solve_tenure = 0, solve_stall = 500, solve_elite = 8;
  auto* solve = app.add_subcommand("solve", "run the heuristic on one instance");
  solve->add_option("instance", solve_path, "ORLIB-format instance file")->required();
  solve->add_option("--index", solve_index, "1-based instance index within the file");
  solve->add_flag("--transform", solve_transform, "search the spectrally augmented matrix");
  solve->add_option("--M", solve_M, "augmentation weight (with --transform)");
  solve->add_option("--k", solve_k, "number of leading eigenpairs (with --transform)");
  solve->add_option("--seed", solve_seed, "RNG seed");
  solve->add_option("--evals", solve_evals, "evaluation (flip move) budget");
  solve->add_option("--time-limit", solve_time, "wall-clock budget in seconds");
  solve->add_option("--tenure", solve_tenure, "tabu tenure (0 = auto)");
  solve->add_option("--stall", solve_stall, "non-improving moves before restart");
  solve->add_option("--elite", solve_elite, "path-relinking pool size");
  solve->add_option("--report", solve_report, "write a JSON run report here");
  solve->add_flag("--trajectory", solve_trajectory, "include the incumbent trajectory in the report");

  // ---- transform ------------------------------------------------------
  std::string tf_path, tf_out;
  std::size_t tf_index = 1, tf_k = 1;
  double tf_M = 100.0;
  auto* tf = app.add_subcommand("transform", "emit the augmented matrix in ORLIB triplet format");
  tf->add_option("instance", tf_path)->required();
  tf->add_option("--index", tf_index, "1-based instance index within the file");
  tf->add_option("--M", tf_M, "augmentation weight");
  tf->add_option("--k", tf_k, "number of leading eigenpairs");
  tf->add_option("--out", tf_out, "output file")->required();

  // ---- eig ------------------------------------------------------------
  std::string eig_path, eig_values_out, eig_hist_out;
  std::size_t eig_index = 1;
  auto* eig = app.add_subcommand("eig", "full-spectrum report of an instance");
  eig->add_option("instance", eig_path)->required();
  eig->add_option("--index", eig_index, "1-based instance index within the file");
  eig->add_option("--eigenvalues", eig_values_out, "write an index,lambda CSV here");
  eig->add_option("--histogram", eig_hist_out, "write a 50-bin histogram CSV here");

  // ---- landscape ------------------------------------------------------
  std::string land_path, land_out, land_M = "0", land_k = "0";
  std::size_t land_index = 1;
  std::uint64_t land_seed = 0;
  std::size_t land_len = 1'000'000, land_lag = 100, land_burn = 1000;
  auto* land = app.add_subcommand("landscape", "random-walk autocorrelation (xi) of an instance");
  land->add_option("instance", land_path)->required();
  land->add_option("--index", land_index, "1-based instance index within the file");
  land->add_option("--M", land_M, "comma-separated M grid (default 0 = untransformed)");
  land->add_option("--k", land_k, "comma-separated k grid (default 0 = untransformed)");
  land->add_option("--walk-length", land_len, "recorded walk steps");
  land->add_option("--max-lag", land_lag, "autocorrelation lags to estimate");
  land->add_option("--burn-in", land_burn, "discarded leading steps");
  land->add_option("--seed", land_seed, "RNG seed");
  land->add_option("--out", land_out, "write the xi grid CSV here");

  // ---- sweep ----------------------------------------------------------
  std::string sweep_config;
  std::size_t sweep_threads = 0;
  bool sweep_threads_set = false;
  auto* sweep = app.add_subcommand("sweep", "base-vs-transformed comparison from a config file");
  sweep->add_option("config", sweep_config, "experiment config file")->required();
  sweep->add_option("--threads", sweep_threads, "worker pool size")
      ->each([&](const std::string&) { sweep_threads_set = true; });

  // ---- gen ------------------------------------------------------------
  std::string gen_family = "orlib-like", gen_out;
  std::size_t gen_n = 0, gen_count = 1;
  double gen_density = 0.1;
  long long gen_low = -100, gen_high = 100;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "generate benchmark-style instances");
  gen->add_option("--family", gen_family, "orlib-like | palubeckis-like | dominant-eig");
  gen->add_option("--n", gen_n, "variable count")->required();
  gen->add_option("--density", gen_density, "cell fill probability in (0,1]");
  gen->add_option("--low", gen_low, "coefficient range low");
  gen->add_option("--high", gen_high, "coefficient range high");
  gen->add_option("--seed", gen_seed, "base seed; instance i uses seed+i");
  gen->add_option("--count", gen_count, "number of instances");
  gen->add_option("--out", gen_out, "output file")->required();

  // ---- mdp2qubo -------------------------------------------------------
  std::string mdp_path, mdp_out;
  double mdp_P = 0.0;
  auto* mdp = app.add_subcommand("mdp2qubo", "reduce an MDPLIB instance to QUBO");
  mdp->add_option("instance", mdp_path, "MDPLIB-format instance file")->required();
  mdp->add_option("--P", mdp_P, "cardinality penalty coefficient")->required();
  mdp->add_option("--out", mdp_out, "output file (ORLIB triplet format)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*solve) {
      if (solve_evals == 0 && solve_time <= 0.0) solve_evals = 1'000'000;
      QuboInstance inst = detail::load_instance(solve_path, solve_index);
      std::optional<QuboInstance> transformed;
      if (solve_transform)
        transformed = transform_q(inst, TransformConfig{solve_M, solve_k});
      SolverConfig cfg;
      cfg.seed = solve_seed;
      cfg.max_evaluations = solve_evals;
      cfg.time_limit = solve_time;
      cfg.tabu_tenure = solve_tenure;
      cfg.restart_stall = solve_stall;
      cfg.elite_size = solve_elite;
      const RunReport report = prlocal(inst, transformed ? &*transformed : nullptr, cfg);
      std::cout << "instance " << inst.name() << " n=" << inst.n() << '\n'
                << "best_base " << format_double(report.best_value_base) << '\n'
                << "best_search " << format_double(report.best_value_search) << '\n'
                << "evaluations " << report.evaluations << " restarts " << report.restarts
                << " relinks " << report.relink_calls << '\n';
      if (!solve_report.empty()) {
        detail::write_file(solve_report, report_to_json_string(report, solve_trajectory));
        detail::write_manifest_for(
            solve_report,
            {{"command", "solve"},
             {"instance", solve_path},
             {"index", std::to_string(solve_index)},
             {"transform", solve_transform ? "1" : "0"},
             {"M", format_double(solve_M)},
             {"k", std::to_string(solve_k)},
             {"seed", std::to_string(solve_seed)},
             {"evals", std::to_string(solve_evals)},
             {"time_limit", format_double(solve_time)},
             {"tenure", std::to_string(solve_tenure)},
             {"stall", std::to_string(solve_stall)},
             {"elite", std::to_string(solve_elite)},
             {"trajectory", solve_trajectory ? "1" : "0"}});
      }
    } else if (*tf) {
      QuboInstance inst = detail::load_instance(tf_path, tf_index);
      const QuboInstance out = transform_q(inst, TransformConfig{tf_M, tf_k});
      std::ostringstream os;
      write_orlib(os, out);
      detail::write_file(tf_out, os.str());
      detail::write_manifest_for(tf_out, {{"command", "transform"},
                                          {"instance", tf_path},
                                          {"index", std::to_string(tf_index)},
                                          {"M", format_double(tf_M)},
                                          {"k", std::to_string(tf_k)},
                                          {"offset", format_double(out.offset())}});
      std::cout << "wrote " << tf_out << " (n=" << out.n() << ")\n";
    } else if (*eig) {
      QuboInstance inst = detail::load_instance(eig_path, eig_index);
      const SpectrumReport report = run_spectrum_report(inst);
      std::cout << "instance " << inst.name() << " n=" << inst.n() << '\n'
                << "max_abs_eigenvalue " << format_double(report.max_abs) << '\n'
                << "second_abs_eigenvalue " << format_double(report.second_abs) << '\n'
                << "dominance_ratio " << format_double(report.dominance_ratio) << '\n';
      const detail::manifest_entries entries = {{"command", "eig"},
                                                {"instance", eig_path},
                                                {"index", std::to_string(eig_index)},
                                                {"max_abs", format_double(report.max_abs)},
                                                {"dominance_ratio",
                                                 format_double(report.dominance_ratio)}};
      if (!eig_values_out.empty()) {
        std::ostringstream os;
        write_eigenvalues_csv(os, report.eigenvalues);
        detail::write_file(eig_values_out, os.str());
        detail::write_manifest_for(eig_values_out, entries);
      }
      if (!eig_hist_out.empty()) {
        std::ostringstream os;
        write_histogram_csv(os, report);
        detail::write_file(eig_hist_out, os.str());
        detail::write_manifest_for(eig_hist_out, entries);
      }
    } else if (*land) {
      QuboInstance inst = detail::load_instance(land_path, land_index);
      WalkConfig cfg;
      cfg.walk_length = land_len;
      cfg.max_lag = land_lag;
      cfg.burn_in = land_burn;
      cfg.seed = land_seed;
      const XiGrid grid =
          xi_grid(inst, detail::parse_double_list(land_M), detail::parse_index_list(land_k), cfg);
      for (std::size_t ki = 0; ki < grid.ks.size(); ++ki)
        for (std::size_t mi = 0; mi < grid.Ms.size(); ++mi) {
          const auto& cell = grid.at(ki, mi);
          std::cout << "M=" << format_double(grid.Ms[mi]) << " k=" << grid.ks[ki] << " xi="
                    << (cell.xi ? format_double(*cell.xi) : std::string("undefined"))
                    << " rho1=" << format_double(cell.rho.empty() ? 0.0 : cell.rho[0])
                    << (cell.zero_variance ? " zero-variance" : "") << '\n';
        }
      if (!land_out.empty()) {
        std::ostringstream os;
        write_xi_grid_csv(os, grid);
        detail::write_file(land_out, os.str());
        detail::write_manifest_for(land_out, {{"command", "landscape"},
                                              {"instance", land_path},
                                              {"index", std::to_string(land_index)},
                                              {"M", land_M},
                                              {"k", land_k},
                                              {"walk_length", std::to_string(land_len)},
                                              {"max_lag", std::to_string(land_lag)},
                                              {"burn_in", std::to_string(land_burn)},
                                              {"seed", std::to_string(land_seed)}});
      }
    } else if (*sweep) {
      std::ifstream in(sweep_config);
      if (!in) throw std::runtime_error("cannot open config file: " + sweep_config);
      ExperimentConfig cfg = parse_experiment_config(in);
      if (sweep_threads_set) cfg.threads = sweep_threads;
      if (cfg.output_dir.empty()) throw std::runtime_error("config must set `output <dir>`");
      std::filesystem::create_directories(cfg.output_dir);
      const ComparisonResult result = run_comparison(cfg);

      const auto out = [&](const std::string& name) {
        return (std::filesystem::path(cfg.output_dir) / name).string();
      };
      std::ostringstream rows_csv, summary_csv;
      write_comparison_csv(rows_csv, result.rows);
      write_summary_csv(summary_csv, result.summary);
      detail::write_file(out("comparison.csv"), rows_csv.str());
      detail::write_file(out("summary.csv"), summary_csv.str());

      detail::manifest_entries entries = {{"command", "sweep"}};
      {
        std::ifstream cfg_in(sweep_config);
        std::string line;
        while (std::getline(cfg_in, line))
          if (!line.empty()) entries.emplace_back("config", line);
      }
      std::ostringstream manifest;
      write_manifest(manifest, entries);
      detail::write_file(out("manifest.txt"), manifest.str());

      std::cout << "rows " << result.rows.size() << " cells " << result.summary.size() << '\n';
      for (const auto& cell : result.summary)
        std::cout << "M=" << format_double(cell.M) << " k=" << cell.k << " avg_improvement_abs="
                  << format_double(cell.avg_improvement_abs) << " avg_improvement_pct="
                  << (cell.avg_improvement_pct ? format_double(*cell.avg_improvement_pct)
                                               : std::string("nan"))
                  << '\n';
      if (!result.errors.empty()) {
        for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
        return 1;
      }
    } else if (*gen) {
      GeneratorSpec spec;
      spec.family = family_from_name(gen_family);
      spec.n = gen_n;
      spec.density = gen_density;
      spec.coeff_low = gen_low;
      spec.coeff_high = gen_high;
      std::vector<QuboInstance> instances;
      for (std::size_t c = 0; c < gen_count; ++c) {
        spec.seed = gen_seed + c;
        instances.push_back(generate(spec));
      }
      std::ostringstream os;
      write_orlib(os, instances);
      detail::write_file(gen_out, os.str());
      detail::write_manifest_for(gen_out, {{"command", "gen"},
                                           {"family", gen_family},
                                           {"n", std::to_string(gen_n)},
                                           {"density", format_double(gen_density)},
                                           {"low", std::to_string(gen_low)},
                                           {"high", std::to_string(gen_high)},
                                           {"seed", std::to_string(gen_seed)},
                                           {"count", std::to_string(gen_count)}});
      std::cout << "wrote " << gen_out << " (" << instances.size() << " instances)\n";
    } else if (*mdp) {
      std::ifstream in(mdp_path);
      if (!in) throw std::runtime_error("cannot open instance file: " + mdp_path);
      const MdpInstance m =
          parse_mdplib(in, std::filesystem::path(mdp_path).stem().string());
      const QuboInstance q = mdp_to_qubo(m, mdp_P);
      std::ostringstream os;
      write_orlib(os, q);
      detail::write_file(mdp_out, os.str());
      detail::write_manifest_for(mdp_out, {{"command", "mdp2qubo"},
                                           {"instance", mdp_path},
                                           {"P", format_double(mdp_P)},
                                           {"n", std::to_string(q.n())},
                                           {"m", std::to_string(m.m)},
                                           {"offset", format_double(q.offset())}});
      std::cout << "wrote " << mdp_out << " (n=" << q.n()
                << ", offset=" << format_double(q.offset())
                << "; the offset is not part of the triplet format)\n";
    }
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

/// Convenience overload for tests.
inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qubo");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qubo::cli
