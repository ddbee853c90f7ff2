#pragma once

// Scenario and experiment configuration. Every seed is explicit so a
// serialized config reproduces the same scenarios and runs.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcosp/problem.hpp"

namespace dcosp {

struct TargetRegion {
  double lat_min = -60.0, lat_max = 70.0;
  double lon_min = -180.0, lon_max = 180.0;
  friend bool operator==(const TargetRegion&, const TargetRegion&) = default;
};

struct ScenarioConfig {
  std::string preset = "custom";

  // "planet", "walker", or "custom" (inline `custom_constellation` or
  // `constellation_file`).
  std::string constellation = "walker";
  std::string constellation_file;
  std::optional<Constellation> custom_constellation;
  double altitude_km = 0.0;  // 0 keeps the constellation default

  std::string target_file;  // CSV id,lat,lon; empty for synthetic targets
  int target_count = 634;
  TargetRegion target_region;

  double horizon_hours = 24.0;
  bool randomize_horizon_start = true;

  int periodicity_min = 5, periodicity_max = 12;
  int volatility_min = 3, volatility_max = 5;

  std::vector<GroundStation> stations = default_ground_stations();
  double scan_step = 10.0;

  double task_duration = 63.0;
  double task_stride = 63.0;
  double volume_mean_mb = 50.0;
  double volume_sd_mb = 10.0;
  double volume_min_mb = 1.0;

  ScenarioSeeds seeds;
  int scenario_count = 10;

  // Experiment settings.
  std::vector<std::string> solvers = {"random", "greedy", "d-nss", "0-nss", "d-dsa", "0-dsa"};
  std::string oracle = "bnb";  // bnb | swo | none
  int gnd_n = 2;
  int neighborhood_size = 4;
  double p_u = 0.7;
  int max_iters = 20;
  bool stop_on_convergence = true;
  // Whether an agent's own scheduled flag counts towards W in the update rule.
  bool w_counts_self = true;
  bool repair_skip_covered = true;
  int workers = 1;
  long long bnb_node_budget = 20'000'000;
  double bnb_time_limit_s = 120.0;
  int swo_rounds = 50;

  // Throws StructuralError naming the offending field.
  void validate() const;
  Constellation resolve_constellation() const;
  Interval horizon() const { return {0.0, horizon_hours * 3600.0}; }
};

// Named presets: tiny, small-planet, small-walker, planet, walker.
ScenarioConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);

void to_json(nlohmann::json& j, const OrbitalPlane& p);
void from_json(const nlohmann::json& j, OrbitalPlane& p);
void to_json(nlohmann::json& j, const Constellation& c);
void from_json(const nlohmann::json& j, Constellation& c);
void to_json(nlohmann::json& j, const GroundStation& s);
void from_json(const nlohmann::json& j, GroundStation& s);
void to_json(nlohmann::json& j, const ScenarioSeeds& s);
void from_json(const nlohmann::json& j, ScenarioSeeds& s);

}  // namespace dcosp
