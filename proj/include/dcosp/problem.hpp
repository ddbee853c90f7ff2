#pragma once

// Data model for static (COSP) and dynamic (DCOSP) observation scheduling.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dcosp/geometry.hpp"
#include "dcosp/types.hpp"

namespace dcosp {

struct Constellation {
  std::string name;
  std::vector<OrbitalPlane> planes;
  double max_off_nadir_deg = 45.0;
  Bytes memory_capacity = 125 * kGigabyte;

  std::size_t satellite_count() const;
  std::vector<SatelliteSpec> satellites() const;
};

// 2 x 95 satellites at 95 deg plus 2 x 5 at 52 deg, 60 deg off-nadir.
Constellation planet_constellation(double altitude_km = 475.0);
// 6 x 14 satellites at 88 deg plus 2 x 12 at 51.6 deg, 45 deg off-nadir.
Constellation walker_constellation(double altitude_km = 500.0);

std::vector<GroundStation> default_ground_stations();

struct Request {
  RequestId id = 0;
  TargetId target = 0;
  Interval window;
};

struct Task {
  TaskId id = 0;
  RequestId request = 0;
  AgentId agent = 0;
  Interval interval;
  Bytes volume = 0;
};

struct Downlink {
  DownlinkId id = 0;
  AgentId agent = 0;
  Interval interval;
  Bytes capacity = 0;
};

struct ChangeEvent {
  Seconds time = 0.0;
  std::vector<RequestId> added;
  std::vector<RequestId> removed;
};

struct ScenarioSeeds {
  std::uint64_t scenario = 2005;
  std::uint64_t repair = 1;
  std::uint64_t solver = 1234;
  std::uint64_t gnd = 2;
  std::uint64_t random_solver = 2023;
  friend bool operator==(const ScenarioSeeds&, const ScenarioSeeds&) = default;
};

// One static snapshot delta_t: the problem as it stands from its start time
// to the end of the global horizon.
struct CospInstance {
  Interval horizon;
  std::vector<SatelliteSpec> agents;
  std::vector<RequestId> active_requests;
  // Tasks of active requests that reach into the instance horizon, per agent.
  std::vector<std::vector<TaskId>> tasks_by_agent;
  std::vector<std::vector<DownlinkId>> downlinks_by_agent;
};

// The dynamic problem: a campaign of requests, the full candidate task set,
// and the timeline of request arrivals and withdrawals.
//
// Ids are dense: requests[i].id == i, tasks[i].id == i, and so on.
class DcospInstance {
 public:
  std::string constellation_ref;
  Interval horizon{0.0, 86400.0};
  double earth_rotation0 = 0.0;
  std::vector<OrbitalPlane> planes;
  std::vector<GroundStation> stations;
  std::vector<SatelliteSpec> agents;
  std::vector<Target> targets;
  std::vector<Request> requests;
  std::vector<Task> tasks;
  std::vector<Downlink> downlinks;
  std::vector<RequestId> initial_active;
  std::vector<ChangeEvent> events;
  ScenarioSeeds seeds;

  // Validates invariants and builds lookup tables. Must be called after the
  // public fields are filled in and before any query below.
  void finalize();

  std::size_t instance_count() const { return events.size() + 1; }
  // h_s(delta_t).
  Seconds instance_start(std::size_t t) const;
  // Interval on which delta_t is the live problem (the last one runs to the
  // end of the horizon).
  Interval static_window(std::size_t t) const;
  // Index of the instance live at time `time`.
  std::size_t instance_at(Seconds time) const;

  // active_sets()[t][r] != 0 iff request r is active in delta_t.
  const std::vector<std::vector<char>>& active_sets() const { return active_; }
  bool is_active(std::size_t t, RequestId r) const {
    return active_[t][static_cast<std::size_t>(r)] != 0;
  }
  // Requests that are active in at least one instance.
  const std::vector<RequestId>& ever_active() const { return ever_active_; }

  std::span<const TaskId> tasks_of_agent(AgentId a) const {
    return tasks_by_agent_[static_cast<std::size_t>(a)];
  }
  std::span<const TaskId> tasks_of_request(RequestId r) const {
    return tasks_by_request_[static_cast<std::size_t>(r)];
  }
  std::span<const DownlinkId> downlinks_of_agent(AgentId a) const {
    return downlinks_by_agent_[static_cast<std::size_t>(a)];
  }
  // Tasks of `a` for `r`, ascending by start time.
  std::vector<TaskId> tasks_of(AgentId a, RequestId r) const;

  CospInstance instance(std::size_t t) const;

  const Task& task(TaskId id) const { return tasks[static_cast<std::size_t>(id)]; }
  const Request& request(RequestId id) const {
    return requests[static_cast<std::size_t>(id)];
  }

 private:
  std::vector<std::vector<TaskId>> tasks_by_agent_;
  std::vector<std::vector<TaskId>> tasks_by_request_;
  std::vector<std::vector<DownlinkId>> downlinks_by_agent_;
  std::vector<std::vector<char>> active_;
  std::vector<RequestId> ever_active_;
};

}  // namespace dcosp
