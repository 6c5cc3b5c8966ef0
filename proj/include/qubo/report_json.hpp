#pragma once

#include <string>

#include "json.hpp"
#include "qubo/solver.hpp"

namespace qubo {

/**
 * JSON form of a run report. Deterministic runs (evaluation budget only)
 * omit wall_time_seconds so repeated runs with the same seed serialize
 * byte-identically; keys are emitted in sorted order.
 */
inline nlohmann::json report_to_json(const RunReport& report, bool include_trajectory = false) {
  nlohmann::json j;
  j["best_value_base"] = report.best_value_base;
  j["best_value_search"] = report.best_value_search;
  j["best_x"] = report.best_solution.x;
  j["deterministic"] = report.deterministic;
  j["evaluations"] = report.evaluations;
  j["relink_calls"] = report.relink_calls;
  j["restarts"] = report.restarts;
  j["seed"] = report.seed;
  if (!report.deterministic) j["wall_time_seconds"] = report.wall_time;
  if (include_trajectory) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& [evals, value] : report.trajectory) t.push_back({evals, value});
    j["trajectory"] = std::move(t);
  }
  return j;
}

inline std::string report_to_json_string(const RunReport& report,
                                         bool include_trajectory = false) {
  return report_to_json(report, include_trajectory).dump(2) + "\n";
}

}  // namespace qubo
