#pragma once

// Event loop over the instance timeline. Solving is instantaneous in
// simulated time: at each change time the solver takes one step, every
// schedule is checked, and the global assignment is snapshotted.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcosp/oracle.hpp"
#include "dcosp/solvers.hpp"
#include "dcosp/utility.hpp"

namespace dcosp {

struct EventStability {
  std::size_t event = 0;
  double before = 0.0;  // last iteration of the previous instance
  double after = 0.0;   // first iteration of this instance
  double drop = 0.0;    // before - after
};

struct RunMetrics {
  std::string solver;
  std::uint64_t scenario_seed = 0;
  int dynamic_utility = 0;
  int ever_active = 0;
  double satisfaction = 0.0;  // percent of ever-active requests
  MessageLedger ledger;
  long long total_ops = 0;
  double mean_agent_ops = 0.0;
  std::vector<int> iterations_per_event;
  std::vector<IterationRecord> trace;
  std::vector<EventStability> stability;
  // Informational only; excluded from determinism comparisons.
  double wall_ms = 0.0;
  double mean_agent_ms = 0.0;
};

struct RunResult {
  RunMetrics metrics;
  ScheduleTrace schedules;  // one snapshot per instance
  // Parameters of the producing solver; absent for offline plans.
  std::optional<SolverParams> params;
};

// Called after each checked step.
using StepObserver = std::function<void(std::size_t t, const DynamicSolver& solver)>;

// Throws SolverInvariantError when a solver returns an infeasible schedule
// or a snapshot holds a task of an inactive request.
RunResult run(const DcospInstance& dcosp, DynamicSolver& solver,
              const StepObserver& observer = {});
RunResult run(const DcospInstance& dcosp, SolverKind kind, const SolverParams& params,
              const StepObserver& observer = {});

// Executes an offline plan: at each step every agent holds the plan's tasks
// of currently active requests. The ledger records the uplink of each
// agent's pending schedule per step.
class PlanSolver final : public DynamicSolver {
 public:
  PlanSolver(const DcospInstance& dcosp, std::vector<TaskId> plan, std::string name);
  std::string name() const override { return name_; }
  StepReport step(std::size_t t) override;

 private:
  std::vector<std::vector<TaskId>> plan_by_agent_;
  std::string name_;
};

// Per-event drop statistics from an iteration trace.
std::vector<EventStability> stability_trace(const std::vector<IterationRecord>& trace,
                                            std::size_t instance_count);
double mean_drop(const std::vector<EventStability>& s);

struct Gap {
  double percent = 0.0;  // oracle % - solver %
  bool vs_optimal = false;
  std::string label() const { return vs_optimal ? "vs. optimal" : "vs. lower bound"; }
};

Gap optimality_gap(const RunMetrics& run, const OracleResult& oracle);

// Time-sweep interpreter: splits the horizon at every change time and task
// boundary and credits a task when a piece of it runs while an instance
// whose snapshot holds it is live.
int replay_dynamic_utility(const ScheduleTrace& trace, const DcospInstance& dcosp);

nlohmann::json metrics_to_json(const RunMetrics& m, bool include_wall = true);
RunMetrics metrics_from_json(const nlohmann::json& j);

// Per-iteration CSV: event,iteration,solver,satisfaction,cumulative_bytes,ops
void write_trace_csv_header(std::ostream& out);
void write_trace_csv(std::ostream& out, const RunMetrics& m);

// Persisted run: metrics plus the schedule trace.
nlohmann::json run_to_json(const RunResult& r);
RunResult run_from_json(const nlohmann::json& j);
void save_run(const RunResult& r, const std::string& path);
RunResult load_run(const std::string& path);

// Recomputes dynamic utility from a persisted trace and checks every
// snapshot. Returns a list of problems (empty when consistent).
std::vector<std::string> verify_run(const DcospInstance& dcosp, const RunResult& r);

}  // namespace dcosp
