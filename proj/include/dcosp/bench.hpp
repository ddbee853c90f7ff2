#pragma once

// Scenario sweeps: every configured solver on every scenario, with an
// offline reference (branch and bound or squeaky wheel) when requested.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcosp/config.hpp"
#include "dcosp/simkernel.hpp"

namespace dcosp {

struct ScenarioEvaluation {
  int index = 0;
  std::uint64_t seed = 0;
  int agents = 0;
  int requests = 0;
  int ever_active = 0;
  int events = 0;
  std::optional<OracleResult> swo;
  std::optional<OracleResult> bnb;
  // Reference used for gaps: the proven B&B optimum, otherwise the best
  // known lower bound (proven == false).
  std::optional<OracleResult> reference;
  std::vector<RunResult> runs;  // in all_solver_kinds() order
  std::optional<RunResult> oracle_run;  // the reference plan executed online
};

// Solvers listed in the config, in the fixed presentation order.
std::vector<SolverKind> configured_solvers(const ScenarioConfig& c);

ScenarioEvaluation evaluate_scenario(const DcospInstance& d, int index, const ScenarioConfig& c);

struct TableRow {
  std::string solver;
  int scenarios = 0;
  double mean_satisfaction = 0.0;
  std::optional<double> mean_gap;
  bool gap_vs_optimal = false;
  double mean_agent_ms = 0.0;
  double mean_agent_ops = 0.0;
  double mean_kb = 0.0;
};

std::vector<TableRow> summarize(const std::vector<ScenarioEvaluation>& evals);
std::string format_table(const std::vector<TableRow>& rows);

nlohmann::json evaluation_to_json(const ScenarioEvaluation& e, bool include_wall = true);
nlohmann::json table_to_json(const std::vector<TableRow>& rows);

}  // namespace dcosp
