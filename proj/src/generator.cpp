#include "dcosp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace dcosp {

std::vector<Request> generate_campaign(std::span<const Target> targets, Interval horizon,
                                       PeriodicityRange periodicity, std::uint64_t seed) {
  if (periodicity.min < 1 || periodicity.max < periodicity.min)
    throw GenerationError("periodicity range must satisfy 1 <= min <= max");
  Rng rng = make_rng(seed, Stream::kPeriodicity);
  std::vector<Request> out;
  for (const Target& t : targets) {
    const int p = uniform_int(rng, periodicity.min, periodicity.max);
    const Seconds len = horizon.duration() / p;
    for (int k = 0; k < p; ++k) {
      const Seconds s = horizon.start + len * k;
      const Seconds e = k + 1 == p ? horizon.end : horizon.start + len * (k + 1);
      out.push_back({static_cast<RequestId>(out.size()), t.id, {s, e}});
    }
  }
  return out;
}

std::vector<Seconds> tile_starts(Interval window, Seconds duration, Seconds stride) {
  std::vector<Seconds> out;
  for (int k = 0;; ++k) {
    const Seconds s = window.start + stride * k;
    if (s + duration > window.end) break;
    out.push_back(s);
  }
  return out;
}

std::vector<Task> generate_tasks(const SatelliteSpec& agent, std::span<const Request> requests,
                                 const std::function<std::vector<Interval>(TargetId)>& windows_for,
                                 const TaskGenParams& params, Rng& rng, TaskId next_id) {
  std::normal_distribution<double> volume(params.volume_mean, params.volume_sd);
  std::vector<Task> out;
  for (const Request& r : requests) {
    for (const Interval& w : windows_for(r.target)) {
      if (!w.overlaps(r.window)) continue;
      for (Seconds s : tile_starts(w.intersect(r.window), params.duration, params.stride)) {
        double v = volume(rng);
        while (v < params.volume_min) v = volume(rng);
        out.push_back({next_id++, r.id, agent.id, {s, s + params.duration},
                       static_cast<Bytes>(std::llround(v))});
      }
    }
  }
  return out;
}

DynamicsPlan generate_dynamics(std::span<const Request> campaign, Interval horizon,
                               int volatility, std::uint64_t seed) {
  const auto n = campaign.size();
  if (volatility < 0) throw GenerationError("volatility must be non-negative");
  if (n < 3)
    throw GenerationError("campaign of " + std::to_string(n) +
                          " requests is too small: at least 3 are needed to split off an "
                          "initial third and later additions");
  Rng rng = make_rng(seed, Stream::kDynamics);
  DynamicsPlan plan;

  std::vector<RequestId> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = campaign[i].id;
  shuffle(std::span(order), rng);
  const std::size_t initial = (n + 2) / 3;
  std::vector<RequestId> active(order.begin(), order.begin() + static_cast<long>(initial));
  std::vector<RequestId> remaining(order.begin() + static_cast<long>(initial), order.end());
  std::sort(active.begin(), active.end());
  std::sort(remaining.begin(), remaining.end());
  plan.initial_active = active;
  if (volatility == 0) return plan;

  const double v = volatility;
  const Seconds earliest = horizon.start + horizon.duration() * (2.0 / (3.0 * v));
  std::vector<Seconds> times;
  while (times.size() < static_cast<std::size_t>(volatility)) {
    const Seconds t = std::uniform_real_distribution<double>(earliest, horizon.end)(rng);
    if (t > horizon.start && std::find(times.begin(), times.end(), t) == times.end())
      times.push_back(t);
  }
  std::sort(times.begin(), times.end());

  auto window_of = [&](RequestId r) {
    return campaign[static_cast<std::size_t>(r)].window;
  };
  const auto add_target = static_cast<std::size_t>(std::ceil(2.0 * n / (3.0 * v)));
  for (Seconds t : times) {
    ChangeEvent ev;
    ev.time = t;
    const auto remove_target =
        static_cast<std::size_t>(std::ceil(static_cast<double>(active.size()) / (3.0 * v)));

    // Draw in random order, skipping requests whose window already opened.
    auto draw = [&](std::vector<RequestId> pool, std::size_t want) {
      shuffle(std::span(pool), rng);
      std::vector<RequestId> picked;
      for (RequestId r : pool) {
        if (picked.size() == want) break;
        if (window_of(r).start > t) picked.push_back(r);
      }
      std::sort(picked.begin(), picked.end());
      return picked;
    };
    ev.removed = draw(active, remove_target);
    ev.added = draw(remaining, add_target);

    std::vector<RequestId> next;
    std::set_difference(active.begin(), active.end(), ev.removed.begin(), ev.removed.end(),
                        std::back_inserter(next));
    std::vector<RequestId> merged;
    std::merge(next.begin(), next.end(), ev.added.begin(), ev.added.end(),
               std::back_inserter(merged));
    active = std::move(merged);
    std::vector<RequestId> rest;
    std::set_difference(remaining.begin(), remaining.end(), ev.added.begin(), ev.added.end(),
                        std::back_inserter(rest));
    remaining = std::move(rest);
    plan.events.push_back(std::move(ev));
  }
  return plan;
}

std::vector<Target> synthetic_targets(int count, const TargetRegion& region, Rng& rng) {
  // Uniform over the spherical patch.
  const double z0 = std::sin(deg2rad(region.lat_min)), z1 = std::sin(deg2rad(region.lat_max));
  std::vector<Target> out;
  for (int i = 0; i < count; ++i) {
    const double z = z0 + (z1 - z0) * uniform01(rng);
    const double lon = region.lon_min + (region.lon_max - region.lon_min) * uniform01(rng);
    out.push_back({i, rad2deg(std::asin(z)), lon});
  }
  return out;
}

std::vector<Target> load_targets_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open target file " + path);
  std::vector<Target> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string id, lat, lon;
    if (!std::getline(ss, id, ',') || !std::getline(ss, lat, ',') || !std::getline(ss, lon, ','))
      throw StructuralError("malformed target line: " + line);
    double la = 0, lo = 0;
    try {
      la = std::stod(lat);
      lo = std::stod(lon);
    } catch (const std::exception&) {
      if (out.empty()) continue;  // header row
      throw StructuralError("malformed target line: " + line);
    }
    if (std::abs(la) > 90.0) throw StructuralError("target latitude out of range: " + line);
    out.push_back({static_cast<TargetId>(out.size()), la, lo});
  }
  return out;
}

namespace {

std::vector<DownlinkWindow> merge_downlinks(std::vector<DownlinkWindow> ws, double rate) {
  std::sort(ws.begin(), ws.end(), [](const auto& a, const auto& b) {
    return a.interval.start < b.interval.start;
  });
  std::vector<DownlinkWindow> out;
  for (const auto& w : ws) {
    if (!out.empty() && out.back().interval.end >= w.interval.start) {
      auto& last = out.back();
      last.interval.end = std::max(last.interval.end, w.interval.end);
      last.capacity = downlink_capacity(last.interval.duration(), rate);
    } else {
      out.push_back(w);
    }
  }
  return out;
}

}  // namespace

DcospInstance generate_scenario(const ScenarioConfig& config, int index) {
  config.validate();
  const Constellation constellation = config.resolve_constellation();
  const std::uint64_t seed = config.seeds.scenario + static_cast<std::uint64_t>(index);

  DcospInstance d;
  d.constellation_ref = constellation.name;
  d.horizon = config.horizon();
  if (config.randomize_horizon_start) {
    Rng h = make_rng(seed, Stream::kHorizon);
    d.earth_rotation0 = 2.0 * kPi * uniform01(h);
  }
  d.planes = constellation.planes;
  d.stations = config.stations;
  d.agents = constellation.satellites();
  d.seeds = config.seeds;
  d.seeds.scenario = seed;

  if (config.target_file.empty()) {
    Rng trng = make_rng(seed, Stream::kTargets);
    d.targets = synthetic_targets(config.target_count, config.target_region, trng);
  } else {
    d.targets = load_targets_csv(config.target_file);
  }
  d.requests = generate_campaign(d.targets, d.horizon,
                                 {config.periodicity_min, config.periodicity_max}, seed);

  const TrackCache cache(d.planes, d.agents, d.horizon, config.scan_step, d.earth_rotation0);
  const TaskGenParams params{config.task_duration, config.task_stride,
                             config.volume_mean_mb * kMegabyte, config.volume_sd_mb * kMegabyte,
                             config.volume_min_mb * kMegabyte};
  Rng task_rng = make_rng(seed, Stream::kTasks);
  for (const SatelliteSpec& a : d.agents) {
    std::map<TargetId, std::vector<Interval>> memo;
    auto windows_for = [&](TargetId t) -> std::vector<Interval> {
      auto it = memo.find(t);
      if (it == memo.end())
        it = memo.emplace(t, cache.access_windows(static_cast<std::size_t>(a.id),
                                                  d.targets[static_cast<std::size_t>(t)]))
                 .first;
      return it->second;
    };
    auto ts = generate_tasks(a, d.requests, windows_for, params, task_rng,
                             static_cast<TaskId>(d.tasks.size()));
    d.tasks.insert(d.tasks.end(), ts.begin(), ts.end());
  }

  double rate = 0.0;
  for (const auto& st : d.stations) rate = std::max(rate, st.downlink_rate);
  for (const SatelliteSpec& a : d.agents) {
    std::vector<DownlinkWindow> ws;
    for (const auto& st : d.stations) {
      auto w = downlink_windows(d.planes[static_cast<std::size_t>(a.plane)], a, st, d.horizon,
                                config.scan_step, d.earth_rotation0);
      ws.insert(ws.end(), w.begin(), w.end());
    }
    for (const auto& w : merge_downlinks(std::move(ws), rate))
      d.downlinks.push_back({static_cast<DownlinkId>(d.downlinks.size()), a.id, w.interval,
                             w.capacity});
  }

  Rng main = make_rng(seed, Stream::kMain);
  const int v = uniform_int(main, config.volatility_min, config.volatility_max);
  DynamicsPlan plan = generate_dynamics(d.requests, d.horizon, v, seed);
  d.initial_active = std::move(plan.initial_active);
  d.events = std::move(plan.events);
  d.finalize();
  return d;
}

}  // namespace dcosp
