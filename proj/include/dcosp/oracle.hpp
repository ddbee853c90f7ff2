#pragma once

// Offline references. collapse() folds the whole timeline into one static
// problem whose optimum equals the best achievable dynamic utility; it is
// then solved exactly (branch and bound) or heuristically (squeaky wheel).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcosp/constraints.hpp"
#include "dcosp/problem.hpp"
#include "dcosp/rng.hpp"

namespace dcosp {

struct CollapsedInstance {
  const DcospInstance* dcosp = nullptr;
  std::vector<RequestId> requests;   // ever-active requests, ascending
  std::vector<TaskId> tasks;         // surviving tasks, ascending
  std::vector<char> survives;        // mask over all task ids
  std::vector<std::vector<TaskId>> tasks_by_request;  // ascending start, then id
  std::vector<AgentModel> models;

  bool contains(TaskId s) const { return survives[static_cast<std::size_t>(s)] != 0; }
};

// A task survives iff its interval overlaps the static window of some
// instance in which its request is active.
CollapsedInstance collapse(const DcospInstance& dcosp);

// Satisfied-request count of a task set over the ever-active requests, after checking it is
// feasible for every agent and made of surviving tasks. Throws
// SolverInvariantError otherwise.
int evaluate_witness(const CollapsedInstance& c, std::span<const TaskId> tasks);

// Requests with at least one surviving task feasible on an empty schedule.
int collapsed_upper_bound(const CollapsedInstance& c);

struct OracleLimits {
  long long node_budget = 20'000'000;
  double time_limit_s = 120.0;
};

struct OracleResult {
  std::string method;  // "bnb" | "swo"
  int value = 0;
  bool proven = false;
  long long nodes = 0;
  int rounds = 0;
  int upper_bound = 0;
  double seconds = 0.0;
  std::vector<TaskId> witness;  // ascending
};

nlohmann::json to_json(const OracleResult& r);

// Depth-first over requests with the fewest candidates first; bound =
// satisfied so far + remaining requests with an insertable candidate.
// `incumbents` are feasible starting solutions. `proven` is false when the
// node budget or time limit stops the search before it is exhausted.
OracleResult branch_and_bound(const CollapsedInstance& c, const OracleLimits& limits,
                              std::span<const std::vector<TaskId>> incumbents = {});

struct SwoOptions {
  int rounds = 50;
  std::uint64_t seed = 1234;
};

// Squeaky wheel optimization: each round builds schedules centrally in
// priority order (earliest feasible task), then promotes every unsatisfied
// request by ceil(|R|/10) places. The best of the rounds and of the
// `warm_starts` is returned.
OracleResult swo(const CollapsedInstance& c, const SwoOptions& options,
                 std::span<const std::vector<TaskId>> warm_starts = {});

}  // namespace dcosp
