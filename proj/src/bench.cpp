#include "dcosp/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace dcosp {

using nlohmann::json;

std::vector<SolverKind> configured_solvers(const ScenarioConfig& c) {
  std::vector<SolverKind> out;
  for (SolverKind k : all_solver_kinds())
    if (std::find(c.solvers.begin(), c.solvers.end(), to_string(k)) != c.solvers.end())
      out.push_back(k);
  return out;
}

ScenarioEvaluation evaluate_scenario(const DcospInstance& d, int index, const ScenarioConfig& c) {
  ScenarioEvaluation e;
  e.index = index;
  e.seed = d.seeds.scenario;
  e.agents = static_cast<int>(d.agents.size());
  e.requests = static_cast<int>(d.requests.size());
  e.ever_active = static_cast<int>(d.ever_active().size());
  e.events = static_cast<int>(d.events.size());
  const SolverParams params = SolverParams::from_config(c);
  for (SolverKind k : configured_solvers(c)) e.runs.push_back(run(d, k, params));
  if (c.oracle == "none") return e;

  const CollapsedInstance col = collapse(d);
  std::vector<std::vector<TaskId>> warm;
  auto greedy = std::find_if(e.runs.begin(), e.runs.end(),
                             [](const RunResult& r) { return r.metrics.solver == "greedy"; });
  if (greedy != e.runs.end())
    warm.push_back(executed_tasks(greedy->schedules, d));
  else
    warm.push_back(executed_tasks(run(d, SolverKind::kGreedy, params).schedules, d));

  e.swo = swo(col, {c.swo_rounds, c.seeds.solver}, warm);
  e.reference = e.swo;
  if (c.oracle == "bnb") {
    const std::vector<std::vector<TaskId>> inc = {e.swo->witness};
    e.bnb = branch_and_bound(col, {c.bnb_node_budget, c.bnb_time_limit_s}, inc);
    e.reference = e.bnb;
    if (!e.bnb->proven && e.swo->value > e.bnb->value) e.reference = e.swo;
    if (!e.bnb->proven) e.reference->proven = e.swo->proven && e.reference->value == e.swo->value;
  }
  PlanSolver plan(d, e.reference->witness, "oracle-" + e.reference->method);
  e.oracle_run = run(d, plan);
  if (e.oracle_run->metrics.dynamic_utility != e.reference->value)
    throw SolverInvariantError("executing the oracle plan yields " +
                               std::to_string(e.oracle_run->metrics.dynamic_utility) +
                               " instead of " + std::to_string(e.reference->value));
  return e;
}

std::vector<TableRow> summarize(const std::vector<ScenarioEvaluation>& evals) {
  std::vector<std::string> order;
  std::map<std::string, TableRow> rows;
  std::map<std::string, int> gaps;
  auto add = [&](const RunResult& r, const ScenarioEvaluation& e) {
    const auto& m = r.metrics;
    if (!rows.contains(m.solver)) {
      order.push_back(m.solver);
      rows[m.solver].solver = m.solver;
      rows[m.solver].gap_vs_optimal = true;
    }
    TableRow& row = rows[m.solver];
    ++row.scenarios;
    row.mean_satisfaction += m.satisfaction;
    row.mean_agent_ms += m.mean_agent_ms;
    row.mean_agent_ops += m.mean_agent_ops;
    row.mean_kb += static_cast<double>(m.ledger.total_bytes()) / 1000.0;
    if (e.reference) {
      const Gap g = optimality_gap(m, *e.reference);
      row.mean_gap = row.mean_gap.value_or(0.0) + g.percent;
      row.gap_vs_optimal = row.gap_vs_optimal && g.vs_optimal;
      ++gaps[m.solver];
    }
  };
  for (const auto& e : evals) {
    for (const auto& r : e.runs) add(r, e);
    if (e.oracle_run) add(*e.oracle_run, e);
  }
  std::vector<TableRow> out;
  for (const auto& name : order) {
    TableRow row = rows[name];
    const double n = row.scenarios;
    row.mean_satisfaction /= n;
    row.mean_agent_ms /= n;
    row.mean_agent_ops /= n;
    row.mean_kb /= n;
    if (row.mean_gap) *row.mean_gap /= gaps[name];
    else row.gap_vs_optimal = false;
    out.push_back(row);
  }
  return out;
}

std::string format_table(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %14s %-16s %12s %14s %14s %9s\n", "Algorithm",
                "Opt. Gap (%)", "Gap basis", "Time (ms)", "Ops/agent", "Messages (KB)",
                "Sat. (%)");
  os << line;
  for (const auto& r : rows) {
    char gap[32] = "n/a";
    if (r.mean_gap) std::snprintf(gap, sizeof gap, "%.3f", *r.mean_gap);
    std::snprintf(line, sizeof line, "%-12s %14s %-16s %12.3f %14.1f %14.3f %9.2f\n",
                  r.solver.c_str(), gap,
                  r.mean_gap ? (r.gap_vs_optimal ? "vs. optimal" : "vs. lower bound") : "-",
                  r.mean_agent_ms, r.mean_agent_ops, r.mean_kb, r.mean_satisfaction);
    os << line;
  }
  return os.str();
}

json evaluation_to_json(const ScenarioEvaluation& e, bool include_wall) {
  json runs = json::array();
  for (const auto& r : e.runs) runs.push_back(metrics_to_json(r.metrics, include_wall));
  json j = {{"index", e.index},     {"seed", e.seed},         {"agents", e.agents},
            {"requests", e.requests}, {"ever_active", e.ever_active}, {"events", e.events},
            {"runs", runs}};
  if (e.swo) j["swo"] = to_json(*e.swo);
  if (e.bnb) j["bnb"] = to_json(*e.bnb);
  if (e.reference) {
    j["reference"] = to_json(*e.reference);
    json gaps = json::object();
    for (const auto& r : e.runs) {
      const Gap g = optimality_gap(r.metrics, *e.reference);
      gaps[r.metrics.solver] = {{"percent", g.percent}, {"basis", g.label()}};
    }
    j["gaps"] = gaps;
  }
  if (e.oracle_run) j["oracle_run"] = metrics_to_json(e.oracle_run->metrics, include_wall);
  return j;
}

json table_to_json(const std::vector<TableRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json row = {{"solver", r.solver},
                {"scenarios", r.scenarios},
                {"mean_satisfaction", r.mean_satisfaction},
                {"mean_agent_ms", r.mean_agent_ms},
                {"mean_agent_ops", r.mean_agent_ops},
                {"mean_messages_kb", r.mean_kb}};
    if (r.mean_gap) {
      row["mean_gap"] = *r.mean_gap;
      row["gap_basis"] = r.gap_vs_optimal ? "vs. optimal" : "vs. lower bound";
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace dcosp
