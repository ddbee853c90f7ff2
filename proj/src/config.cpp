#include "dcosp/config.hpp"

#include <cmath>
#include <fstream>

namespace dcosp {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw StructuralError("config field '" + field + "': " + what);
}

Constellation tiny_constellation() {
  Constellation c;
  c.name = "tiny";
  c.planes.push_back({88.0, 500.0, 0.0, 4, 0.0});
  c.planes.push_back({51.6, 500.0, 90.0, 4, 45.0});
  c.max_off_nadir_deg = 45.0;
  c.memory_capacity = 125 * kGigabyte;
  return c;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(constellation == "planet" || constellation == "walker" || constellation == "custom",
          "constellation", "must be planet, walker or custom");
  if (constellation == "custom")
    require(custom_constellation.has_value() || !constellation_file.empty(),
            "constellation_file", "custom constellation needs a file or inline definition");
  require(altitude_km >= 0.0, "altitude_km", "must be non-negative");
  require(target_file.empty() ? target_count > 0 : true, "target_count", "must be positive");
  require(target_region.lat_min <= target_region.lat_max &&
              std::abs(target_region.lat_min) <= 90 && std::abs(target_region.lat_max) <= 90,
          "target_region", "latitude range invalid");
  require(horizon_hours > 0.0, "horizon_hours", "must be positive");
  require(periodicity_min >= 1 && periodicity_min <= periodicity_max, "periodicity",
          "need 1 <= min <= max");
  require(volatility_min >= 0 && volatility_min <= volatility_max, "volatility",
          "need 0 <= min <= max");
  require(scan_step > 0.0, "scan_step", "must be positive");
  require(task_duration > 0.0, "task_duration", "must be positive");
  require(task_stride > 0.0, "task_stride", "must be positive");
  require(volume_mean_mb > 0.0 && volume_sd_mb >= 0.0 && volume_min_mb > 0.0, "volume",
          "mean and minimum must be positive");
  require(scenario_count >= 1, "scenario_count", "must be at least 1");
  for (const auto& s : solvers)
    require(s == "random" || s == "greedy" || s == "d-nss" || s == "0-nss" || s == "d-dsa" ||
                s == "0-dsa",
            "solvers", "unknown solver '" + s + "'");
  require(oracle == "bnb" || oracle == "swo" || oracle == "none", "oracle",
          "must be bnb, swo or none");
  require(gnd_n >= 1, "gnd_n", "must be at least 1");
  require(neighborhood_size >= 1, "neighborhood_size", "must be at least 1");
  require(p_u >= 0.0 && p_u <= 1.0, "p_u", "must lie in [0, 1]");
  require(max_iters >= 1, "max_iters", "must be at least 1");
  require(workers >= 1, "workers", "must be at least 1");
  require(bnb_node_budget > 0, "bnb_node_budget", "must be positive");
  require(swo_rounds >= 1, "swo_rounds", "must be at least 1");
  for (const auto& st : stations) st.validate();
}

Constellation ScenarioConfig::resolve_constellation() const {
  Constellation c;
  if (constellation == "planet") {
    c = planet_constellation(altitude_km > 0 ? altitude_km : 475.0);
  } else if (constellation == "walker") {
    c = walker_constellation(altitude_km > 0 ? altitude_km : 500.0);
  } else if (custom_constellation) {
    c = *custom_constellation;
  } else {
    std::ifstream in(constellation_file);
    if (!in) throw StructuralError("cannot open constellation file " + constellation_file);
    c = json::parse(in).get<Constellation>();
  }
  for (const auto& p : c.planes) p.validate();
  if (!(c.max_off_nadir_deg > 0.0 && c.max_off_nadir_deg < 90.0))
    throw StructuralError("off-nadir angle must lie in (0, 90) deg");
  if (c.memory_capacity <= 0) throw StructuralError("memory capacity must be positive");
  return c;
}

std::vector<std::string> preset_names() {
  return {"tiny", "small-planet", "small-walker", "planet", "walker"};
}

ScenarioConfig preset_config(const std::string& name) {
  ScenarioConfig c;
  c.preset = name;
  if (name == "tiny") {
    c.constellation = "custom";
    c.custom_constellation = tiny_constellation();
    c.target_count = 10;
    c.target_region = {35.0, 45.0, 0.0, 15.0};
    c.periodicity_min = c.periodicity_max = 3;
    c.neighborhood_size = 2;
    c.scenario_count = 30;
  } else if (name == "small-planet") {
    c.constellation = "planet";
    c.target_count = 166;
    c.periodicity_min = c.periodicity_max = 3;
  } else if (name == "small-walker") {
    c.constellation = "walker";
    c.target_count = 333;
    c.periodicity_min = c.periodicity_max = 3;
  } else if (name == "planet") {
    c.constellation = "planet";
    c.oracle = "swo";
  } else if (name == "walker") {
    c.constellation = "walker";
    c.oracle = "swo";
  } else {
    throw StructuralError("config field 'preset': unknown preset '" + name + "'");
  }
  return c;
}

void to_json(json& j, const OrbitalPlane& p) {
  j = json{{"inclination_deg", p.inclination_deg},
           {"altitude_km", p.altitude_km},
           {"raan_deg", p.raan_deg},
           {"satellite_count", p.satellite_count},
           {"phase_offset_deg", p.phase_offset_deg}};
}

void from_json(const json& j, OrbitalPlane& p) {
  p.inclination_deg = j.at("inclination_deg").get<double>();
  p.altitude_km = j.at("altitude_km").get<double>();
  p.raan_deg = j.value("raan_deg", 0.0);
  p.satellite_count = j.at("satellite_count").get<int>();
  p.phase_offset_deg = j.value("phase_offset_deg", 0.0);
}

void to_json(json& j, const Constellation& c) {
  j = json{{"name", c.name},
           {"planes", c.planes},
           {"max_off_nadir_deg", c.max_off_nadir_deg},
           {"memory_capacity", c.memory_capacity}};
}

void from_json(const json& j, Constellation& c) {
  c.name = j.value("name", std::string("custom"));
  c.planes = j.at("planes").get<std::vector<OrbitalPlane>>();
  c.max_off_nadir_deg = j.at("max_off_nadir_deg").get<double>();
  c.memory_capacity = j.at("memory_capacity").get<Bytes>();
}

void to_json(json& j, const GroundStation& s) {
  j = json{{"name", s.name},
           {"latitude_deg", s.latitude_deg},
           {"longitude_deg", s.longitude_deg},
           {"min_elevation_deg", s.min_elevation_deg},
           {"downlink_rate", s.downlink_rate}};
}

void from_json(const json& j, GroundStation& s) {
  s.name = j.at("name").get<std::string>();
  s.latitude_deg = j.at("latitude_deg").get<double>();
  s.longitude_deg = j.at("longitude_deg").get<double>();
  s.min_elevation_deg = j.value("min_elevation_deg", 5.0);
  s.downlink_rate = j.value("downlink_rate", 62.5e6);
}

void to_json(json& j, const ScenarioSeeds& s) {
  j = json{{"scenario", s.scenario},
           {"repair", s.repair},
           {"solver", s.solver},
           {"gnd", s.gnd},
           {"random_solver", s.random_solver}};
}

void from_json(const json& j, ScenarioSeeds& s) {
  s.scenario = j.at("scenario").get<std::uint64_t>();
  s.repair = j.at("repair").get<std::uint64_t>();
  s.solver = j.at("solver").get<std::uint64_t>();
  s.gnd = j.at("gnd").get<std::uint64_t>();
  s.random_solver = j.at("random_solver").get<std::uint64_t>();
}

void to_json(json& j, const ScenarioConfig& c) {
  j = json{{"preset", c.preset},
           {"constellation", c.constellation},
           {"constellation_file", c.constellation_file},
           {"altitude_km", c.altitude_km},
           {"target_file", c.target_file},
           {"target_count", c.target_count},
           {"target_region",
            {{"lat_min", c.target_region.lat_min},
             {"lat_max", c.target_region.lat_max},
             {"lon_min", c.target_region.lon_min},
             {"lon_max", c.target_region.lon_max}}},
           {"horizon_hours", c.horizon_hours},
           {"randomize_horizon_start", c.randomize_horizon_start},
           {"periodicity", {c.periodicity_min, c.periodicity_max}},
           {"volatility", {c.volatility_min, c.volatility_max}},
           {"stations", c.stations},
           {"scan_step", c.scan_step},
           {"task_duration", c.task_duration},
           {"task_stride", c.task_stride},
           {"volume_mb", {{"mean", c.volume_mean_mb}, {"sd", c.volume_sd_mb}, {"min", c.volume_min_mb}}},
           {"seeds", c.seeds},
           {"scenario_count", c.scenario_count},
           {"solvers", c.solvers},
           {"oracle", c.oracle},
           {"gnd_n", c.gnd_n},
           {"neighborhood_size", c.neighborhood_size},
           {"p_u", c.p_u},
           {"max_iters", c.max_iters},
           {"stop_on_convergence", c.stop_on_convergence},
           {"w_counts_self", c.w_counts_self},
           {"repair_skip_covered", c.repair_skip_covered},
           {"workers", c.workers},
           {"bnb_node_budget", c.bnb_node_budget},
           {"bnb_time_limit_s", c.bnb_time_limit_s},
           {"swo_rounds", c.swo_rounds}};
  if (c.custom_constellation) j["custom_constellation"] = *c.custom_constellation;
}

// Fields absent from `j` keep their current values, so a partial file can
// override a preset.
void from_json(const json& j, ScenarioConfig& c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("preset", c.preset);
  get("constellation", c.constellation);
  get("constellation_file", c.constellation_file);
  if (j.contains("custom_constellation"))
    c.custom_constellation = j.at("custom_constellation").get<Constellation>();
  get("altitude_km", c.altitude_km);
  get("target_file", c.target_file);
  get("target_count", c.target_count);
  if (j.contains("target_region")) {
    const auto& r = j.at("target_region");
    c.target_region = {r.at("lat_min").get<double>(), r.at("lat_max").get<double>(),
                       r.at("lon_min").get<double>(), r.at("lon_max").get<double>()};
  }
  get("horizon_hours", c.horizon_hours);
  get("randomize_horizon_start", c.randomize_horizon_start);
  if (j.contains("periodicity")) {
    c.periodicity_min = j.at("periodicity").at(0).get<int>();
    c.periodicity_max = j.at("periodicity").at(1).get<int>();
  }
  if (j.contains("volatility")) {
    c.volatility_min = j.at("volatility").at(0).get<int>();
    c.volatility_max = j.at("volatility").at(1).get<int>();
  }
  get("stations", c.stations);
  get("scan_step", c.scan_step);
  get("task_duration", c.task_duration);
  get("task_stride", c.task_stride);
  if (j.contains("volume_mb")) {
    const auto& v = j.at("volume_mb");
    c.volume_mean_mb = v.value("mean", c.volume_mean_mb);
    c.volume_sd_mb = v.value("sd", c.volume_sd_mb);
    c.volume_min_mb = v.value("min", c.volume_min_mb);
  }
  get("seeds", c.seeds);
  get("scenario_count", c.scenario_count);
  get("solvers", c.solvers);
  get("oracle", c.oracle);
  get("gnd_n", c.gnd_n);
  get("neighborhood_size", c.neighborhood_size);
  get("p_u", c.p_u);
  get("max_iters", c.max_iters);
  get("stop_on_convergence", c.stop_on_convergence);
  get("w_counts_self", c.w_counts_self);
  get("repair_skip_covered", c.repair_skip_covered);
  get("workers", c.workers);
  get("bnb_node_budget", c.bnb_node_budget);
  get("bnb_time_limit_s", c.bnb_time_limit_s);
  get("swo_rounds", c.swo_rounds);
}

}  // namespace dcosp
