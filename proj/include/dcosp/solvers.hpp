#pragma once

// Online solvers. Every solver owns one Schedule per agent and is advanced
// once per problem instance with step(t). Tasks starting before the
// instance start are frozen: they were already (being) executed and are
// never added or removed afterwards.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcosp/config.hpp"
#include "dcosp/constraints.hpp"
#include "dcosp/decomposition.hpp"
#include "dcosp/ledger.hpp"
#include "dcosp/rng.hpp"

namespace dcosp {

enum class SolverKind { kRandom, kGreedy, kDnss, kZeroNss, kDdsa, kZeroDsa };

std::string to_string(SolverKind k);
SolverKind parse_solver(const std::string& name);  // throws StructuralError
// Fixed presentation order.
const std::vector<SolverKind>& all_solver_kinds();

struct SolverParams {
  double p_u = 0.7;
  int max_iters = 20;
  bool stop_on_convergence = true;
  // Whether an agent's own scheduled flag counts towards W.
  bool w_counts_self = true;
  // Repair leaves out requests that were already in the agent's subproblem
  // and that some member reported holding at the last exchange. False
  // re-inserts every candidate.
  bool repair_skip_covered = true;
  int workers = 1;
  GndOptions gnd;
  ScenarioSeeds seeds;

  static SolverParams from_config(const ScenarioConfig& c);
};

nlohmann::json params_to_json(const SolverParams& p);
// Absent fields keep their defaults.
SolverParams params_from_json(const nlohmann::json& j);

// Probability that an agent is assigned to r in the next iteration.
double assign_probability(bool executed, bool assigned, int w, double p_u);
// Draws against `rng` only when the probability is strictly between 0 and 1;
// `draws` (if given) is incremented per draw.
bool stochastic_update(bool executed, bool assigned, int w, double p_u, Rng& rng,
                       long long* draws = nullptr);

struct InsertResult {
  bool inserted = false;
  TaskId task = -1;
  std::optional<TaskId> displaced;
  long long checks = 0;
};

// Tries to schedule one of `candidates` (tasks of one request, ascending
// start). A free insertion of any candidate is preferred; failing that, each
// candidate in turn may displace the unfrozen task whose start is closest to
// its own (ties: larger volume, then lower id). At most one removal.
InsertResult schedule_insert(Schedule& sched, const DcospInstance& dcosp,
                             std::span<const TaskId> candidates, Seconds now);

// Drops unfrozen tasks whose request is outside `keep` or in `excluded`,
// then greedily inserts the shuffled `candidates` whose request is in `keep`
// and not `excluded`. Candidates of requests in `biased` go first.
// Masks are indexed by request id. Returns the number of constraint checks.
long long repair(Schedule& sched, const DcospInstance& dcosp, std::span<const TaskId> candidates,
                 const std::vector<char>& keep, const std::vector<char>& excluded,
                 const std::vector<char>& biased, Seconds now, Rng& rng);

struct IterationRecord {
  std::size_t event = 0;  // instance index
  int iteration = 0;      // 1-based within the event
  double quality = 0.0;   // % of ever-active requests with a task in some schedule
  long long messages = 0;
  Bytes bytes = 0;
  Bytes cumulative_bytes = 0;
  long long cumulative_ops = 0;
};

struct StepReport {
  std::vector<IterationRecord> iterations;
  bool converged = false;
};

class DynamicSolver {
 public:
  explicit DynamicSolver(const DcospInstance& dcosp);
  virtual ~DynamicSolver() = default;
  DynamicSolver(const DynamicSolver&) = delete;
  DynamicSolver& operator=(const DynamicSolver&) = delete;

  virtual std::string name() const = 0;
  // Advances to instance t; t must increase by one per call from 0.
  virtual StepReport step(std::size_t t) = 0;

  const DcospInstance& instance() const { return dcosp_; }
  const std::vector<Schedule>& schedules() const { return schedules_; }
  const MessageLedger& ledger() const { return ledger_; }
  // Deterministic per-agent operation counts (constraint checks, RNG
  // draws, message serializations).
  const std::vector<long long>& ops() const { return ops_; }
  long long total_ops() const;
  // Wall-clock per agent, milliseconds.
  const std::vector<double>& agent_ms() const { return ms_; }
  // Requests each agent has executed (dense mask per agent).
  const std::vector<std::vector<char>>& executed() const { return executed_; }
  double quality() const;
  // All scheduled task ids, ascending.
  std::vector<TaskId> snapshot() const;

 protected:
  // Records requests of frozen tasks as executed.
  void freeze(Seconds now);
  void drop_inactive(std::size_t t, Seconds now);

  const DcospInstance& dcosp_;
  std::vector<AgentModel> models_;
  std::vector<Schedule> schedules_;
  std::vector<std::vector<char>> executed_;
  MessageLedger ledger_;
  std::vector<long long> ops_;
  std::vector<double> ms_;
  std::size_t next_t_ = 0;
};

// Neighborhood stochastic search family: D-NSS, 0-NSS (GND) and D-DSA,
// 0-DSA (one neighborhood of all agents and requests).
class StochasticSearchSolver final : public DynamicSolver {
 public:
  StochasticSearchSolver(const DcospInstance& dcosp, SolverKind kind, const SolverParams& params);
  std::string name() const override { return to_string(kind_); }
  StepReport step(std::size_t t) override;
  const Allocation& allocation() const { return allocation_; }
  const std::vector<std::vector<char>>& assigned() const { return assigned_; }

 private:
  SolverKind kind_;
  SolverParams params_;
  std::unique_ptr<Decomposer> decomposer_;
  Allocation allocation_;
  std::vector<Rng> search_rng_;
  std::vector<Rng> repair_rng_;
  std::vector<std::vector<char>> assigned_;
  std::vector<std::vector<char>> seen_;   // previous R_N per agent
  std::vector<std::vector<char>> heard_;  // held by someone in the last exchange
};

// Communication-free single pass per event: ascending start (greedy) or a
// seeded shuffle (random).
class SinglePassSolver final : public DynamicSolver {
 public:
  SinglePassSolver(const DcospInstance& dcosp, bool randomized, const SolverParams& params);
  std::string name() const override { return randomized_ ? "random" : "greedy"; }
  StepReport step(std::size_t t) override;

 private:
  bool randomized_;
  int workers_;
  std::vector<Rng> rng_;
};

std::unique_ptr<DynamicSolver> make_solver(SolverKind kind, const DcospInstance& dcosp,
                                           const SolverParams& params);

// Runs f(i) for i in [0, n) on up to `workers` threads; f must only touch
// state owned by index i.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& f);

}  // namespace dcosp
