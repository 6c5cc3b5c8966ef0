#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qubo/harness.hpp"
#include "test_support.hpp"

using namespace qubo;

namespace {

ExperimentConfig toy_config() {
  ExperimentConfig cfg;
  GeneratorRequest req;
  req.spec.n = 12;
  req.spec.density = 0.5;
  req.spec.seed = 3;
  req.count = 3;
  cfg.generators.push_back(req);
  cfg.M_grid = {0.0, 1.0};
  cfg.k_grid = {0, 1};
  cfg.evaluations = 1500;
  cfg.repetitions = 2;
  cfg.seed_base = 5;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("experiment config parsing", "[harness]") {
  std::istringstream in(
      "# toy sweep\n"
      "instance data/foo.qubo\n"
      "generate family=dominant-eig n=200 density=0.1 low=-100 high=100 seed=7 count=20\n"
      "M 0,100, 200\n"
      "k 0,1\n"
      "evals 20000\n"
      "repetitions 5\n"
      "seed 12345\n"
      "output results\n"
      "trajectory 1\n"
      "threads 4\n"
      "stall 300\n");
  const ExperimentConfig cfg = parse_experiment_config(in);
  REQUIRE(cfg.instance_paths == std::vector<std::string>{"data/foo.qubo"});
  REQUIRE(cfg.generators.size() == 1);
  REQUIRE(cfg.generators[0].spec.family == InstanceFamily::dominant_eig);
  REQUIRE(cfg.generators[0].spec.n == 200);
  REQUIRE(cfg.generators[0].count == 20);
  REQUIRE(cfg.M_grid == std::vector<double>{0.0, 100.0, 200.0});
  REQUIRE(cfg.k_grid == std::vector<std::size_t>{0, 1});
  REQUIRE(cfg.evaluations == 20000);
  REQUIRE(cfg.repetitions == 5);
  REQUIRE(cfg.seed_base == 12345);
  REQUIRE(cfg.output_dir == "results");
  REQUIRE(cfg.write_trajectory);
  REQUIRE(cfg.threads == 4);
  REQUIRE(cfg.restart_stall == 300);
}

TEST_CASE("experiment config errors carry line numbers", "[harness]") {
  std::istringstream bad_key("M 100\nwhatever 3\n");
  try {
    parse_experiment_config(bad_key);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    REQUIRE(e.line() == 2);
  }
  std::istringstream bad_generator("generate n=ten\n");
  REQUIRE_THROWS_AS(parse_experiment_config(bad_generator), parse_error);
}

TEST_CASE("comparison sweep over a toy grid", "[harness]") {
  const ExperimentConfig cfg = toy_config();
  const ComparisonResult result = run_comparison(cfg);
  REQUIRE(result.errors.empty());
  REQUIRE(result.rows.size() == 3 * 2 * 2);
  REQUIRE(result.summary.size() == 4);

  for (const auto& row : result.rows) {
    // identity cells reproduce the base run exactly
    if (row.M == 0.0 || row.k == 0) {
      REQUIRE(row.improvement_abs == 0.0);
      REQUIRE(row.improvement_pct.has_value());
      REQUIRE(*row.improvement_pct == 0.0);
    }
    // pct self-consistency
    if (row.improvement_pct)
      REQUIRE_THAT(*row.improvement_pct,
                   Catch::Matchers::WithinAbs(
                       100.0 * (row.transformed_best - row.base_best) / std::fabs(row.base_best),
                       1e-9));
  }
  // rows are sorted by (instance, M, k)
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    const auto& a = result.rows[i - 1];
    const auto& b = result.rows[i];
    REQUIRE(std::tie(a.instance, a.M, a.k) <= std::tie(b.instance, b.M, b.k));
  }
}

TEST_CASE("sweeps are reproducible across runs and schedulers", "[harness]") {
  const ExperimentConfig cfg = toy_config();
  ExperimentConfig serial = cfg;
  serial.threads = 1;
  const ComparisonResult a = run_comparison(cfg);
  const ComparisonResult b = run_comparison(serial);
  std::ostringstream csv_a, csv_b, sum_a, sum_b;
  write_comparison_csv(csv_a, a.rows);
  write_comparison_csv(csv_b, b.rows);
  write_summary_csv(sum_a, a.summary);
  write_summary_csv(sum_b, b.summary);
  REQUIRE(csv_a.str() == csv_b.str());
  REQUIRE(sum_a.str() == sum_b.str());
}

TEST_CASE("unreadable sources become error records, not aborts", "[harness]") {
  ExperimentConfig cfg = toy_config();
  cfg.instance_paths.push_back("/nonexistent/никого.qubo");
  const ComparisonResult result = run_comparison(cfg);
  REQUIRE(result.errors.size() == 1);
  REQUIRE(result.rows.size() == 12);  // generator instances still ran
}

TEST_CASE("comparison csv layout", "[harness]") {
  ComparisonRow row;
  row.instance = "x";
  row.M = 100.0;
  row.k = 2;
  row.base_best = 10.0;
  row.transformed_best = 11.0;
  row.improvement_abs = 1.0;
  row.improvement_pct = 10.0;
  std::ostringstream os;
  write_comparison_csv(os, {row});
  REQUIRE(os.str() ==
          "instance,M,k,base_best,transformed_best,improvement_abs,improvement_pct\n"
          "x,100,2,10,11,1,10\n");

  row.base_best = 0.0;
  row.improvement_pct.reset();
  std::ostringstream os2;
  write_comparison_csv(os2, {row});
  REQUIRE(os2.str().find(",nan\n") != std::string::npos);
}

TEST_CASE("spectrum report of a known diagonal", "[harness]") {
  QuboInstance q(100);
  for (std::size_t i = 0; i < 100; ++i) q.set(i, i, static_cast<double>(i + 1));
  const SpectrumReport report = run_spectrum_report(q);
  REQUIRE(report.eigenvalues.size() == 100);
  REQUIRE_THAT(report.max_abs, Catch::Matchers::WithinAbs(100.0, 1e-9));
  REQUIRE(report.bin_counts.size() == 50);
  for (const auto count : report.bin_counts) REQUIRE(count == 2);  // uniform spectrum
  REQUIRE_THAT(report.bin_edges.front(), Catch::Matchers::WithinAbs(1.0, 1e-9));
  REQUIRE_THAT(report.bin_edges.back(), Catch::Matchers::WithinAbs(100.0, 1e-9));
}

TEST_CASE("sparse uniform instances have a bulk spectrum peaked near zero", "[harness]") {
  GeneratorSpec spec;
  spec.n = 1000;
  spec.density = 0.1;
  spec.seed = 1;
  const SpectrumReport report = run_spectrum_report(generate(spec));
  REQUIRE(report.max_abs > 300.0);   // order 1e3 for this size and density
  REQUIRE(report.max_abs < 3000.0);
  std::size_t modal = 0;
  for (std::size_t b = 0; b < report.bin_counts.size(); ++b)
    if (report.bin_counts[b] > report.bin_counts[modal]) modal = b;
  const double modal_center = 0.5 * (report.bin_edges[modal] + report.bin_edges[modal + 1]);
  REQUIRE(std::fabs(modal_center) < 0.25 * report.max_abs);  // peak near zero
  // thin tails relative to the peak
  REQUIRE(report.bin_counts.front() * 2 < report.bin_counts[modal]);
  REQUIRE(report.bin_counts.back() * 2 < report.bin_counts[modal]);
}

TEST_CASE("reduced diversity instances show one dominant negative eigenvalue", "[harness]") {
  rng::engine gen(4);
  const MdpInstance mdp = test::random_mdp(gen, 100, 10, 0, 9);
  const QuboInstance q = mdp_to_qubo(mdp, 10.0);
  const SpectrumReport report = run_spectrum_report(q);
  REQUIRE(report.eigenvalues.back() < -300.0);         // the dominant (negative) outlier
  REQUIRE(report.eigenvalues.back() == -report.max_abs);
  REQUIRE(report.dominance_ratio > 1.3);               // separated from the bulk
  REQUIRE(report.eigenvalues.front() < 300.0);         // bulk stays moderate
}

TEST_CASE("histogram csv shape", "[harness]") {
  QuboInstance q(4);
  for (std::size_t i = 0; i < 4; ++i) q.set(i, i, static_cast<double>(i));
  const SpectrumReport report = run_spectrum_report(q, 4);
  std::ostringstream os;
  write_histogram_csv(os, report);
  const std::string csv = os.str();
  REQUIRE(csv.rfind("bin_low,bin_high,count\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("cell seeds separate instances, cells and repetitions", "[harness]") {
  const auto s = derive_cell_seed(1, "a", 100.0, 1, 0);
  REQUIRE(s == derive_cell_seed(1, "a", 100.0, 1, 0));
  REQUIRE(s != derive_cell_seed(2, "a", 100.0, 1, 0));
  REQUIRE(s != derive_cell_seed(1, "b", 100.0, 1, 0));
  REQUIRE(s != derive_cell_seed(1, "a", 200.0, 1, 0));
  REQUIRE(s != derive_cell_seed(1, "a", 100.0, 2, 0));
  REQUIRE(s != derive_cell_seed(1, "a", 100.0, 1, 1));
}

TEST_CASE("manifest format", "[harness]") {
  std::ostringstream os;
  write_manifest(os, {{"command", "sweep"}, {"seed", "5"}});
  const std::string m = os.str();
  REQUIRE(m.rfind("tool qubo-toolkit\nversion ", 0) == 0);
  REQUIRE(m.find("command sweep\n") != std::string::npos);
  REQUIRE(m.find("seed 5\n") != std::string::npos);
}
