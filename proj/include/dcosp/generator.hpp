#pragma once

// Seeded generators for observation campaigns, candidate tasks, request
// dynamics, and complete scenarios.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dcosp/config.hpp"
#include "dcosp/problem.hpp"
#include "dcosp/rng.hpp"

namespace dcosp {

struct PeriodicityRange {
  int min = 3;
  int max = 3;
};

// One request per interval for each target: the target draws p uniformly
// from the range and the horizon is cut into p equal intervals.
std::vector<Request> generate_campaign(std::span<const Target> targets, Interval horizon,
                                       PeriodicityRange periodicity, std::uint64_t seed);

struct TaskGenParams {
  Seconds duration = 63.0;
  Seconds stride = 63.0;
  double volume_mean = 50.0 * kMegabyte;
  double volume_sd = 10.0 * kMegabyte;
  double volume_min = 1.0 * kMegabyte;
};

// Start times of the tasks tiling `window` from its start.
std::vector<Seconds> tile_starts(Interval window, Seconds duration, Seconds stride);

// Candidate tasks of one agent. `windows_for(target)` returns the agent's
// access windows for that target. Task ids continue from `next_id`.
std::vector<Task> generate_tasks(const SatelliteSpec& agent, std::span<const Request> requests,
                                 const std::function<std::vector<Interval>(TargetId)>& windows_for,
                                 const TaskGenParams& params, Rng& rng, TaskId next_id);

struct DynamicsPlan {
  std::vector<RequestId> initial_active;
  std::vector<ChangeEvent> events;
};

// v change events over the final 1 - 2/(3v) of the horizon. The initial
// active set is ceil(N/3) of the campaign; each event adds ceil(2N/(3v))
// not-yet-seen requests and removes ceil(|active|/(3v)) active ones, drawing
// only requests whose window has not opened yet.
DynamicsPlan generate_dynamics(std::span<const Request> campaign, Interval horizon,
                               int volatility, std::uint64_t seed);

std::vector<Target> synthetic_targets(int count, const TargetRegion& region, Rng& rng);
std::vector<Target> load_targets_csv(const std::string& path);

// Full scenario for `config` with scenario seed = config.seeds.scenario + index.
DcospInstance generate_scenario(const ScenarioConfig& config, int index = 0);

}  // namespace dcosp
