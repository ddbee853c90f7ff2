#include "dcosp/scenario_io.hpp"

#include <fstream>

#include "dcosp/config.hpp"

namespace dcosp {

using nlohmann::json;

json scenario_to_json(const DcospInstance& d) {
  json j;
  j["format"] = "dcosp-scenario";
  j["version"] = kScenarioFormatVersion;
  j["constellation_ref"] = d.constellation_ref;
  j["horizon"] = {d.horizon.start, d.horizon.end};
  j["earth_rotation0"] = d.earth_rotation0;
  j["seeds"] = d.seeds;
  j["planes"] = d.planes;
  j["stations"] = d.stations;

  json agents = json::array();
  for (const auto& a : d.agents)
    agents.push_back({a.id, a.plane, a.index_in_plane, a.max_off_nadir_deg, a.memory_capacity});
  j["agents"] = std::move(agents);

  json targets = json::array();
  for (const auto& t : d.targets) targets.push_back({t.id, t.latitude_deg, t.longitude_deg});
  j["targets"] = std::move(targets);

  json requests = json::array();
  for (const auto& r : d.requests)
    requests.push_back({r.id, r.target, r.window.start, r.window.end});
  j["requests"] = std::move(requests);

  json tasks = json::array();
  for (const auto& t : d.tasks)
    tasks.push_back({t.id, t.request, t.agent, t.interval.start, t.interval.end, t.volume});
  j["tasks"] = std::move(tasks);

  json downlinks = json::array();
  for (const auto& dl : d.downlinks)
    downlinks.push_back({dl.id, dl.agent, dl.interval.start, dl.interval.end, dl.capacity});
  j["downlinks"] = std::move(downlinks);

  j["initial_active"] = d.initial_active;
  json events = json::array();
  for (const auto& e : d.events)
    events.push_back({{"time", e.time}, {"added", e.added}, {"removed", e.removed}});
  j["events"] = std::move(events);
  j["columns"] = {{"agents", {"id", "plane", "index_in_plane", "max_off_nadir_deg", "memory_capacity"}},
                  {"targets", {"id", "latitude_deg", "longitude_deg"}},
                  {"requests", {"id", "target", "start", "end"}},
                  {"tasks", {"id", "request", "agent", "start", "end", "volume"}},
                  {"downlinks", {"id", "agent", "start", "end", "capacity"}}};
  return j;
}

DcospInstance scenario_from_json(const json& j) {
  if (j.value("format", std::string()) != "dcosp-scenario")
    throw StructuralError("not a dcosp scenario document");
  if (j.at("version").get<int>() != kScenarioFormatVersion)
    throw StructuralError("unsupported scenario version " + j.at("version").dump());
  DcospInstance d;
  try {
    d.constellation_ref = j.at("constellation_ref").get<std::string>();
    d.horizon = {j.at("horizon").at(0).get<double>(), j.at("horizon").at(1).get<double>()};
    d.earth_rotation0 = j.at("earth_rotation0").get<double>();
    d.seeds = j.at("seeds").get<ScenarioSeeds>();
    d.planes = j.at("planes").get<std::vector<OrbitalPlane>>();
    d.stations = j.at("stations").get<std::vector<GroundStation>>();
    for (const auto& a : j.at("agents"))
      d.agents.push_back({a[0].get<AgentId>(), a[1].get<int>(), a[2].get<int>(),
                          a[3].get<double>(), a[4].get<Bytes>()});
    for (const auto& t : j.at("targets"))
      d.targets.push_back({t[0].get<TargetId>(), t[1].get<double>(), t[2].get<double>()});
    for (const auto& r : j.at("requests"))
      d.requests.push_back(
          {r[0].get<RequestId>(), r[1].get<TargetId>(), {r[2].get<double>(), r[3].get<double>()}});
    d.tasks.reserve(j.at("tasks").size());
    for (const auto& t : j.at("tasks"))
      d.tasks.push_back({t[0].get<TaskId>(), t[1].get<RequestId>(), t[2].get<AgentId>(),
                         {t[3].get<double>(), t[4].get<double>()}, t[5].get<Bytes>()});
    for (const auto& dl : j.at("downlinks"))
      d.downlinks.push_back({dl[0].get<DownlinkId>(), dl[1].get<AgentId>(),
                             {dl[2].get<double>(), dl[3].get<double>()}, dl[4].get<Bytes>()});
    d.initial_active = j.at("initial_active").get<std::vector<RequestId>>();
    for (const auto& e : j.at("events"))
      d.events.push_back({e.at("time").get<double>(), e.at("added").get<std::vector<RequestId>>(),
                          e.at("removed").get<std::vector<RequestId>>()});
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed scenario document: ") + e.what());
  }
  d.finalize();
  return d;
}

std::string dump_json(const json& j) { return j.dump(1) + "\n"; }

void save_scenario(const DcospInstance& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write " + path);
  out << dump_json(scenario_to_json(d));
}

DcospInstance load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw StructuralError(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace dcosp
