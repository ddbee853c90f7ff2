#include "dcosp/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>

#include "dcosp/constraints.hpp"
#include "dcosp/rng.hpp"

namespace dcosp {

std::vector<Neighborhood> partition_agents(std::span<const SatelliteSpec> agents, int size) {
  if (size < 1) throw StructuralError("neighborhood size must be at least 1");
  std::map<int, std::vector<const SatelliteSpec*>> by_plane;
  for (const auto& a : agents) by_plane[a.plane].push_back(&a);
  std::vector<Neighborhood> out;
  for (auto& [plane, sats] : by_plane) {
    std::sort(sats.begin(), sats.end(), [](const SatelliteSpec* a, const SatelliteSpec* b) {
      return a->index_in_plane < b->index_in_plane;
    });
    for (std::size_t i = 0; i < sats.size(); i += static_cast<std::size_t>(size)) {
      Neighborhood n;
      n.id = static_cast<int>(out.size());
      for (std::size_t k = i; k < std::min(sats.size(), i + static_cast<std::size_t>(size)); ++k)
        n.members.push_back(sats[k]->id);
      std::sort(n.members.begin(), n.members.end());
      out.push_back(std::move(n));
    }
  }
  return out;
}

const SupplyRow* SupplyTable::find(RequestId r) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), r,
                             [](const SupplyRow& row, RequestId id) { return row.request < id; });
  if (it != rows.end() && it->request == r) return &*it;
  for (const auto& row : rows)  // rows not sorted by id
    if (row.request == r) return &row;
  return nullptr;
}

SupplyTable compute_supply(std::span<const RequestId> requests,
                           std::span<const Neighborhood> neighborhoods,
                           std::span<const SatelliteSpec> agents, int plane_count,
                           const CandidateFn& has_candidate) {
  std::vector<int> hood_of(agents.size(), -1);
  for (const auto& n : neighborhoods)
    for (AgentId a : n.members) hood_of.at(static_cast<std::size_t>(a)) = n.id;
  SupplyTable table;
  table.rows.reserve(requests.size());
  for (RequestId r : requests) {
    SupplyRow row;
    row.request = r;
    row.by_plane.assign(static_cast<std::size_t>(plane_count), 0);
    row.by_neighborhood.assign(neighborhoods.size(), 0);
    for (const auto& a : agents) {
      if (!has_candidate(a.id, r)) continue;
      ++row.by_plane.at(static_cast<std::size_t>(a.plane));
      const int h = hood_of[static_cast<std::size_t>(a.id)];
      if (h >= 0) ++row.by_neighborhood[static_cast<std::size_t>(h)];
    }
    row.total = std::accumulate(row.by_plane.begin(), row.by_plane.end(), 0);
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t tile_key(const Target& t, double tile_deg) {
  const auto row = static_cast<std::int64_t>(std::floor((t.latitude_deg + 90.0) / tile_deg));
  const auto col = static_cast<std::int64_t>(std::floor((t.longitude_deg + 180.0) / tile_deg));
  return mix64(static_cast<std::uint64_t>(row) * 1000003ULL + static_cast<std::uint64_t>(col));
}

}  // namespace

Allocation allocate(std::span<const Request> requests, std::vector<Neighborhood> neighborhoods,
                    const SupplyTable& supply, std::span<const Target> targets,
                    const CandidateFn& has_candidate, const GndOptions& options) {
  if (options.n < 1) throw StructuralError("GND needs n >= 1");
  Allocation out;
  out.neighborhoods = std::move(neighborhoods);
  for (auto& n : out.neighborhoods) {
    n.requests.clear();
    n.bias.clear();
  }
  AgentId max_agent = -1;
  for (const auto& n : out.neighborhoods)
    for (AgentId a : n.members) max_agent = std::max(max_agent, a);
  out.neighborhood_of_agent.assign(static_cast<std::size_t>(max_agent + 1), -1);
  for (const auto& n : out.neighborhoods)
    for (AgentId a : n.members) out.neighborhood_of_agent[static_cast<std::size_t>(a)] = n.id;

  std::map<RequestId, const Request*> by_id;
  for (const auto& r : requests) by_id[r.id] = &r;

  std::vector<const SupplyRow*> order;
  for (const auto& row : supply.rows) order.push_back(&row);
  Rng rng = make_rng(options.seed);
  shuffle(std::span(order), rng);
  std::stable_sort(order.begin(), order.end(), [](const SupplyRow* a, const SupplyRow* b) {
    return a->total < b->total;
  });

  // Windows already allocated to each neighborhood.
  std::vector<std::vector<Interval>> held(out.neighborhoods.size());
  for (const SupplyRow* row : order) {
    const Request& req = *by_id.at(row->request);
    if (row->total == 0) {
      out.unallocatable.push_back(req.id);
      continue;
    }
    struct Candidate {
      int hood;
      long long supply;
      long long conflicts;
    };
    std::vector<Candidate> cands;
    for (std::size_t h = 0; h < out.neighborhoods.size(); ++h) {
      const int s = row->by_neighborhood[h];
      if (s == 0) continue;
      long long c = 0;
      for (const Interval& w : held[h]) c += w.overlaps(req.window) ? 1 : 0;
      cands.push_back({static_cast<int>(h), s, c});
    }
    // Exact comparison of s1/(1+c1) against s2/(1+c2).
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      const long long lhs = a.supply * (1 + b.conflicts), rhs = b.supply * (1 + a.conflicts);
      return lhs != rhs ? lhs > rhs : a.hood < b.hood;
    });
    const std::size_t take = std::min(cands.size(), static_cast<std::size_t>(options.n));
    for (std::size_t k = 0; k < take; ++k) {
      Neighborhood& n = out.neighborhoods[static_cast<std::size_t>(cands[k].hood)];
      n.requests.push_back(req.id);
      held[static_cast<std::size_t>(cands[k].hood)].push_back(req.window);
      std::vector<AgentId> able;
      for (AgentId a : n.members)
        if (has_candidate(a, req.id)) able.push_back(a);
      const Target& t = targets[static_cast<std::size_t>(req.target)];
      n.bias[req.id] = able[tile_key(t, options.tile_deg) % able.size()];
    }
  }
  for (auto& n : out.neighborhoods) std::sort(n.requests.begin(), n.requests.end());
  std::sort(out.unallocatable.begin(), out.unallocatable.end());
  return out;
}

CandidateFn future_candidates(const DcospInstance& dcosp, Seconds now) {
  // Sorted (request, agent) pairs with at least one task starting at or
  // after now that fits on an empty schedule.
  std::vector<AgentModel> models;
  models.reserve(dcosp.agents.size());
  for (const auto& a : dcosp.agents) models.emplace_back(dcosp, a.id);
  auto pairs = std::make_shared<std::vector<std::pair<RequestId, AgentId>>>();
  for (const Task& t : dcosp.tasks) {
    if (t.interval.start < now) continue;
    const AgentModel& m = models[static_cast<std::size_t>(t.agent)];
    if (m.hits_downlink(t) || t.volume > m.bucket_limit(m.bucket_of(t))) continue;
    pairs->emplace_back(t.request, t.agent);
  }
  std::sort(pairs->begin(), pairs->end());
  pairs->erase(std::unique(pairs->begin(), pairs->end()), pairs->end());
  return [pairs](AgentId a, RequestId r) {
    return std::binary_search(pairs->begin(), pairs->end(), std::make_pair(r, a));
  };
}

Allocation GeometricNeighborhoodDecomposition::decompose(const DcospInstance& dcosp,
                                                         std::span<const RequestId> active,
                                                         Seconds now) const {
  auto hoods = partition_agents(dcosp.agents, options_.neighborhood_size);
  const auto has = future_candidates(dcosp, now);
  const auto table = compute_supply(active, hoods, dcosp.agents,
                                    static_cast<int>(dcosp.planes.size()), has);
  std::vector<Request> reqs;
  for (RequestId r : active) reqs.push_back(dcosp.request(r));
  return allocate(reqs, std::move(hoods), table, dcosp.targets, has, options_);
}

Allocation WholeProblemDecomposition::decompose(const DcospInstance& dcosp,
                                                std::span<const RequestId> active,
                                                Seconds) const {
  Allocation out;
  Neighborhood n;
  for (const auto& a : dcosp.agents) n.members.push_back(a.id);
  n.requests.assign(active.begin(), active.end());
  std::sort(n.requests.begin(), n.requests.end());
  out.neighborhoods.push_back(std::move(n));
  out.neighborhood_of_agent.assign(dcosp.agents.size(), 0);
  return out;
}

nlohmann::json allocation_to_json(const Allocation& a) {
  nlohmann::json hoods = nlohmann::json::array();
  for (const auto& n : a.neighborhoods) {
    nlohmann::json bias = nlohmann::json::array();
    for (const auto& [r, agent] : n.bias) bias.push_back({r, agent});
    hoods.push_back({{"id", n.id}, {"members", n.members}, {"requests", n.requests},
                     {"bias", bias}});
  }
  // request -> neighborhoods -> biased agents
  std::map<RequestId, nlohmann::json> per_request;
  for (const auto& n : a.neighborhoods)
    for (RequestId r : n.requests) {
      auto it = n.bias.find(r);
      per_request[r].push_back(
          {{"neighborhood", n.id}, {"agent", it == n.bias.end() ? -1 : it->second}});
    }
  nlohmann::json reqs = nlohmann::json::array();
  for (auto& [r, v] : per_request) reqs.push_back({{"request", r}, {"allocations", v}});
  return {{"neighborhoods", hoods}, {"requests", reqs}, {"unallocatable", a.unallocatable}};
}

void write_allocation(const Allocation& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write " + path);
  out << allocation_to_json(a).dump(1) << "\n";
}

}  // namespace dcosp
