#include "dcosp/problem.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace dcosp {

std::size_t Constellation::satellite_count() const {
  std::size_t n = 0;
  for (const auto& p : planes) n += static_cast<std::size_t>(p.satellite_count);
  return n;
}

std::vector<SatelliteSpec> Constellation::satellites() const {
  std::vector<SatelliteSpec> out;
  AgentId id = 0;
  for (std::size_t p = 0; p < planes.size(); ++p) {
    for (int i = 0; i < planes[p].satellite_count; ++i)
      out.push_back({id++, static_cast<int>(p), i, max_off_nadir_deg, memory_capacity});
  }
  return out;
}

namespace {

// Star pattern for near-polar planes (ascending nodes over 180 deg), delta
// pattern for inclined ones (over 360 deg); satellites in neighbouring planes
// are staggered by a fraction of the in-plane spacing.
void add_plane_group(Constellation& c, int planes, int per_plane, double inclination,
                     double altitude, double raan0) {
  const double spread = inclination > 80.0 && inclination < 100.0 ? 180.0 : 360.0;
  for (int j = 0; j < planes; ++j) {
    OrbitalPlane p;
    p.inclination_deg = inclination;
    p.altitude_km = altitude;
    p.raan_deg = raan0 + spread * j / planes;
    p.satellite_count = per_plane;
    p.phase_offset_deg = 360.0 / per_plane * j / planes;
    c.planes.push_back(p);
  }
}

}  // namespace

Constellation planet_constellation(double altitude_km) {
  Constellation c;
  c.name = "planet";
  add_plane_group(c, 2, 95, 95.0, altitude_km, 0.0);
  add_plane_group(c, 2, 5, 52.0, altitude_km, 45.0);
  c.max_off_nadir_deg = 60.0;
  c.memory_capacity = 125 * kGigabyte;
  return c;
}

Constellation walker_constellation(double altitude_km) {
  Constellation c;
  c.name = "walker";
  add_plane_group(c, 6, 14, 88.0, altitude_km, 0.0);
  add_plane_group(c, 2, 12, 51.6, altitude_km, 15.0);
  c.max_off_nadir_deg = 45.0;
  c.memory_capacity = 125 * kGigabyte;
  return c;
}

std::vector<GroundStation> default_ground_stations() {
  return {{"fairbanks", 64.86, -147.85, 5.0, 62.5e6}, {"guam", 13.62, 144.86, 5.0, 62.5e6}};
}

void DcospInstance::finalize() {
  const auto nr = requests.size(), nt = tasks.size(), na = agents.size();
  if (!horizon.valid()) throw StructuralError("horizon end precedes start");
  for (std::size_t i = 0; i < na; ++i)
    if (agents[i].id != static_cast<AgentId>(i))
      throw StructuralError("agent ids must be dense");
  for (std::size_t i = 0; i < nr; ++i) {
    const Request& r = requests[i];
    if (r.id != static_cast<RequestId>(i)) throw StructuralError("request ids must be dense");
    if (!horizon.contains(r.window))
      throw StructuralError("request " + std::to_string(i) + " window outside horizon");
  }

  tasks_by_agent_.assign(na, {});
  tasks_by_request_.assign(nr, {});
  for (std::size_t i = 0; i < nt; ++i) {
    const Task& t = tasks[i];
    if (t.id != static_cast<TaskId>(i)) throw StructuralError("task ids must be dense");
    if (t.request < 0 || static_cast<std::size_t>(t.request) >= nr || t.agent < 0 ||
        static_cast<std::size_t>(t.agent) >= na)
      throw StructuralError("task " + std::to_string(i) + " references unknown entity");
    if (t.volume <= 0) throw StructuralError("task " + std::to_string(i) + " has no volume");
    if (!request(t.request).window.contains(t.interval))
      throw StructuralError("task " + std::to_string(i) + " outside its request window");
    tasks_by_agent_[static_cast<std::size_t>(t.agent)].push_back(t.id);
    tasks_by_request_[static_cast<std::size_t>(t.request)].push_back(t.id);
  }
  auto by_start = [this](TaskId a, TaskId b) {
    const auto& x = task(a).interval;
    const auto& y = task(b).interval;
    return x.start != y.start ? x.start < y.start : a < b;
  };
  for (auto& v : tasks_by_agent_) std::sort(v.begin(), v.end(), by_start);
  for (auto& v : tasks_by_request_) std::sort(v.begin(), v.end(), by_start);

  downlinks_by_agent_.assign(na, {});
  for (std::size_t i = 0; i < downlinks.size(); ++i) {
    const Downlink& d = downlinks[i];
    if (d.id != static_cast<DownlinkId>(i)) throw StructuralError("downlink ids must be dense");
    if (d.capacity < 0) throw StructuralError("negative downlink capacity");
    downlinks_by_agent_.at(static_cast<std::size_t>(d.agent)).push_back(d.id);
  }
  for (auto& v : downlinks_by_agent_) {
    std::sort(v.begin(), v.end(), [this](DownlinkId a, DownlinkId b) {
      return downlinks[static_cast<std::size_t>(a)].interval.start <
             downlinks[static_cast<std::size_t>(b)].interval.start;
    });
    for (std::size_t k = 1; k < v.size(); ++k)
      if (downlinks[static_cast<std::size_t>(v[k - 1])].interval.overlaps(
              downlinks[static_cast<std::size_t>(v[k])].interval))
        throw StructuralError("downlinks of one agent overlap");
  }

  // Replay the timeline into per-instance active sets.
  active_.assign(instance_count(), std::vector<char>(nr, 0));
  std::vector<char> removed(nr, 0), seen(nr, 0);
  std::vector<char> cur(nr, 0);
  for (RequestId r : initial_active) {
    if (r < 0 || static_cast<std::size_t>(r) >= nr) throw StructuralError("unknown request");
    cur[static_cast<std::size_t>(r)] = 1;
    seen[static_cast<std::size_t>(r)] = 1;
  }
  active_[0] = cur;
  Seconds prev = horizon.start;
  for (std::size_t e = 0; e < events.size(); ++e) {
    const ChangeEvent& ev = events[e];
    if (!(ev.time > prev) || ev.time > horizon.end)
      throw StructuralError("change times must be strictly increasing inside the horizon");
    prev = ev.time;
    for (RequestId r : ev.removed) {
      auto i = static_cast<std::size_t>(r);
      if (i >= nr || !cur[i]) throw StructuralError("removing inactive request");
      if (request(r).window.start <= ev.time)
        throw StructuralError("request changed after its window opened");
      cur[i] = 0;
      removed[i] = 1;
    }
    for (RequestId r : ev.added) {
      auto i = static_cast<std::size_t>(r);
      if (i >= nr || cur[i]) throw StructuralError("adding active request");
      if (removed[i]) throw StructuralError("removed request re-added");
      if (request(r).window.start <= ev.time)
        throw StructuralError("request changed after its window opened");
      cur[i] = 1;
      seen[i] = 1;
    }
    active_[e + 1] = cur;
  }
  ever_active_.clear();
  for (std::size_t i = 0; i < nr; ++i)
    if (seen[i]) ever_active_.push_back(static_cast<RequestId>(i));
}

Seconds DcospInstance::instance_start(std::size_t t) const {
  return t == 0 ? horizon.start : events.at(t - 1).time;
}

Interval DcospInstance::static_window(std::size_t t) const {
  const Seconds end = t + 1 < instance_count() ? instance_start(t + 1) : horizon.end;
  return {instance_start(t), end};
}

std::size_t DcospInstance::instance_at(Seconds time) const {
  std::size_t t = 0;
  while (t + 1 < instance_count() && instance_start(t + 1) <= time) ++t;
  return t;
}

std::vector<TaskId> DcospInstance::tasks_of(AgentId a, RequestId r) const {
  std::vector<TaskId> out;
  for (TaskId id : tasks_of_request(r))
    if (task(id).agent == a) out.push_back(id);
  return out;
}

CospInstance DcospInstance::instance(std::size_t t) const {
  CospInstance c;
  c.horizon = {instance_start(t), horizon.end};
  c.agents = agents;
  for (std::size_t r = 0; r < requests.size(); ++r)
    if (active_[t][r]) c.active_requests.push_back(static_cast<RequestId>(r));
  c.tasks_by_agent.resize(agents.size());
  c.downlinks_by_agent.resize(agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    for (TaskId id : tasks_by_agent_[a]) {
      const Task& s = task(id);
      if (active_[t][static_cast<std::size_t>(s.request)] && s.interval.end > c.horizon.start)
        c.tasks_by_agent[a].push_back(id);
    }
    c.downlinks_by_agent[a] = downlinks_by_agent_[a];
  }
  return c;
}

}  // namespace dcosp
