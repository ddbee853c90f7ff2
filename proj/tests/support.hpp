#pragma once

// Test-only builders and reference implementations. The references are
// written from the definitions directly (pairwise scans, full enumeration)
// and share no code with the library beyond the data model.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "dcosp/problem.hpp"
#include "dcosp/rng.hpp"
#include "dcosp/utility.hpp"

namespace dcosp::testkit {

// Hand-built instances. Every request gets its own target on a 10 deg
// grid; agents are laid out plane by plane.
class Builder {
 public:
  explicit Builder(std::vector<int> sats_per_plane = {1}, Seconds horizon_end = 86400.0,
                   Bytes memory = 125 * kGigabyte) {
    d_.horizon = {0.0, horizon_end};
    AgentId id = 0;
    for (std::size_t p = 0; p < sats_per_plane.size(); ++p) {
      OrbitalPlane plane;
      plane.satellite_count = sats_per_plane[p];
      d_.planes.push_back(plane);
      for (int i = 0; i < sats_per_plane[p]; ++i)
        d_.agents.push_back({id++, static_cast<int>(p), i, 45.0, memory});
    }
  }

  RequestId request(Interval window, bool initially_active = true) {
    const auto id = static_cast<RequestId>(d_.requests.size());
    d_.targets.push_back({static_cast<TargetId>(id), -80.0 + 10.0 * (id % 16), 10.0 * (id % 36)});
    d_.requests.push_back({id, static_cast<TargetId>(id), window});
    if (initially_active) d_.initial_active.push_back(id);
    return id;
  }

  TaskId task(RequestId r, AgentId a, Seconds start, Bytes volume = 50 * kMegabyte,
              Seconds duration = 63.0) {
    const auto id = static_cast<TaskId>(d_.tasks.size());
    d_.tasks.push_back({id, r, a, {start, start + duration}, volume});
    return id;
  }

  DownlinkId downlink(AgentId a, Interval iv, Bytes capacity) {
    const auto id = static_cast<DownlinkId>(d_.downlinks.size());
    d_.downlinks.push_back({id, a, iv, capacity});
    return id;
  }

  void event(Seconds time, std::vector<RequestId> added, std::vector<RequestId> removed) {
    d_.events.push_back({time, std::move(added), std::move(removed)});
  }

  DcospInstance build() {
    DcospInstance d = d_;
    std::sort(d.initial_active.begin(), d.initial_active.end());
    d.finalize();
    return d;
  }

 private:
  DcospInstance d_;
};

struct RandomSpec {
  std::vector<int> sats_per_plane = {2, 2};
  int requests = 10;
  int max_tasks_per_pair = 2;  // per (request, agent)
  double pair_probability = 0.6;
  int events = 2;
  Seconds horizon = 7200.0;
  Bytes memory = 400 * kMegabyte;
  int downlinks_per_agent = 2;
};

// Seeded synthetic instance: random windows, tasks, downlinks and a valid
// change timeline (eligibility respected, no re-adds).
inline DcospInstance random_instance(std::uint64_t seed, const RandomSpec& spec) {
  Rng rng = make_rng(seed, 77);
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  Builder b(spec.sats_per_plane, spec.horizon, spec.memory);
  int agents = 0;
  for (int n : spec.sats_per_plane) agents += n;

  // Whole seconds keep comparisons exact.
  auto whole = [](double x) { return std::floor(x); };
  for (int r = 0; r < spec.requests; ++r) {
    const Seconds len = whole(uni(0.15, 0.5) * spec.horizon);
    const Seconds start = whole(uni(0.0, spec.horizon - len));
    b.request({start, start + len}, false);
  }
  DcospInstance tmp = b.build();  // for request windows
  for (int r = 0; r < spec.requests; ++r) {
    const Interval w = tmp.requests[static_cast<std::size_t>(r)].window;
    for (int a = 0; a < agents; ++a) {
      if (uni(0, 1) > spec.pair_probability) continue;
      const int k = uniform_int(rng, 1, spec.max_tasks_per_pair);
      for (int i = 0; i < k; ++i) {
        const Seconds s = whole(uni(w.start, w.end - 63.0));
        b.task(r, a, s, static_cast<Bytes>(uni(20, 80)) * kMegabyte);
      }
    }
  }
  for (int a = 0; a < agents; ++a) {
    std::vector<Seconds> starts;
    for (int i = 0; i < spec.downlinks_per_agent; ++i) starts.push_back(whole(uni(0, spec.horizon - 200)));
    std::sort(starts.begin(), starts.end());
    Seconds last_end = -1.0;
    for (Seconds s : starts) {
      if (s <= last_end) continue;
      const Seconds len = whole(uni(60, 180));
      b.downlink(a, {s, s + len}, static_cast<Bytes>(uni(60, 200)) * kMegabyte);
      last_end = s + len;
    }
  }

  // Timeline.
  std::vector<RequestId> order(static_cast<std::size_t>(spec.requests));
  for (int r = 0; r < spec.requests; ++r) order[static_cast<std::size_t>(r)] = r;
  shuffle(std::span(order), rng);
  const std::size_t initial = (order.size() + 1) / 2;
  std::set<RequestId> active(order.begin(), order.begin() + static_cast<long>(initial));
  std::set<RequestId> unseen(order.begin() + static_cast<long>(initial), order.end());
  std::vector<Seconds> times;
  for (int e = 0; e < spec.events; ++e) times.push_back(whole(uni(1.0, spec.horizon - 1.0)));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  DcospInstance d = b.build();
  d.initial_active.assign(active.begin(), active.end());
  for (Seconds t : times) {
    ChangeEvent ev;
    ev.time = t;
    for (RequestId r : std::vector<RequestId>(active.begin(), active.end()))
      if (d.request(r).window.start > t && uni(0, 1) < 0.3) {
        ev.removed.push_back(r);
        active.erase(r);
      }
    for (RequestId r : std::vector<RequestId>(unseen.begin(), unseen.end()))
      if (d.request(r).window.start > t && uni(0, 1) < 0.5) {
        ev.added.push_back(r);
        unseen.erase(r);
        active.insert(r);
      }
    d.events.push_back(ev);
  }
  d.finalize();
  return d;
}

// ---- reference oracles ----------------------------------------------------

// Constraint check by definition: pairwise overlap scan, downlink overlap
// scan, and per-downlink load sums where each task drains at the first
// downlink starting at or after its end.
inline bool reference_feasible(const DcospInstance& d, const std::vector<TaskId>& ids,
                               AgentId a, bool one_per_request = true) {
  std::vector<Task> ts;
  for (TaskId s : ids) ts.push_back(d.task(s));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i].agent != a) return false;
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      if (ts[i].interval.start < ts[j].interval.end && ts[j].interval.start < ts[i].interval.end)
        return false;
      if (one_per_request && ts[i].request == ts[j].request) return false;
    }
  }
  std::vector<Downlink> dls;
  for (const auto& dl : d.downlinks)
    if (dl.agent == a) dls.push_back(dl);
  for (const auto& t : ts)
    for (const auto& dl : dls)
      if (t.interval.start < dl.interval.end && dl.interval.start < t.interval.end) return false;
  const Bytes memory = d.agents[static_cast<std::size_t>(a)].memory_capacity;
  std::map<int, Bytes> load;  // -1: no later downlink
  for (const auto& t : ts) {
    int best = -1;
    for (std::size_t k = 0; k < dls.size(); ++k)
      if (dls[k].interval.start >= t.interval.end &&
          (best < 0 || dls[k].interval.start < dls[static_cast<std::size_t>(best)].interval.start))
        best = static_cast<int>(k);
    load[best] += t.volume;
  }
  for (const auto& [k, l] : load) {
    const Bytes limit = k < 0 ? memory : std::min(memory, dls[static_cast<std::size_t>(k)].capacity);
    if (l > limit) return false;
  }
  return true;
}

// Event-by-event interpreter: walk the instances in order and mark a task
// executed when it was held in the snapshot of an instance and part of its
// interval falls inside that instance's live period.
inline int interpreted_dynamic_utility(const ScheduleTrace& trace, const DcospInstance& d) {
  std::set<RequestId> done;
  for (std::size_t t = 0; t < d.instance_count(); ++t) {
    const Seconds from = d.instance_start(t);
    const Seconds to = t + 1 < d.instance_count() ? d.instance_start(t + 1) : d.horizon.end;
    for (TaskId s : trace[t]) {
      const Interval h = d.task(s).interval;
      if (std::max(h.start, from) < std::min(h.end, to)) done.insert(d.task(s).request);
    }
  }
  int n = 0;
  for (RequestId r : d.ever_active()) n += done.count(r) ? 1 : 0;
  return n;
}

// Exhaustive optimum of the static problem over `requests`, restricted to
// `allowed` tasks: every request picks none or one of its tasks, and every
// partial choice is checked with the reference constraint test.
inline int exhaustive_optimum(const DcospInstance& d, const std::vector<RequestId>& requests,
                              const std::vector<char>& allowed) {
  std::vector<std::vector<TaskId>> per_agent(d.agents.size());
  int best = 0;
  std::function<void(std::size_t, int)> go = [&](std::size_t i, int sat) {
    if (sat + static_cast<int>(requests.size() - i) <= best) return;
    if (i == requests.size()) {
      best = std::max(best, sat);
      return;
    }
    for (TaskId s : d.tasks_of_request(requests[i])) {
      if (!allowed[static_cast<std::size_t>(s)]) continue;
      auto& sched = per_agent[static_cast<std::size_t>(d.task(s).agent)];
      sched.push_back(s);
      if (reference_feasible(d, sched, d.task(s).agent)) go(i + 1, sat + 1);
      sched.pop_back();
    }
    go(i + 1, sat);
  };
  go(0, 0);
  return best;
}

// Random per-instance feasible snapshots: for each instance every agent
// greedily takes a random subset of its tasks of active requests.
inline ScheduleTrace random_trace(const DcospInstance& d, Rng& rng) {
  ScheduleTrace trace;
  for (std::size_t t = 0; t < d.instance_count(); ++t) {
    std::vector<TaskId> snap;
    for (const auto& a : d.agents) {
      std::vector<TaskId> cand;
      for (TaskId s : d.tasks_of_agent(a.id))
        if (d.is_active(t, d.task(s).request)) cand.push_back(s);
      shuffle(std::span(cand), rng);
      std::vector<TaskId> chosen;
      for (TaskId s : cand) {
        if (uniform01(rng) < 0.5) continue;
        chosen.push_back(s);
        if (!reference_feasible(d, chosen, a.id)) chosen.pop_back();
      }
      snap.insert(snap.end(), chosen.begin(), chosen.end());
    }
    std::sort(snap.begin(), snap.end());
    trace.push_back(snap);
  }
  return trace;
}

}  // namespace dcosp::testkit
