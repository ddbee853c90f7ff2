#pragma once

// Geometric neighborhood decomposition: agents are grouped into
// neighborhoods along their orbital planes, and each request is handed to
// the n neighborhoods with the best ratio of supply to temporal conflicts.
// Decomposition is computed locally from shared static knowledge and sends
// no messages.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcosp/problem.hpp"

namespace dcosp {

struct Neighborhood {
  int id = 0;
  std::vector<AgentId> members;     // ascending
  std::vector<RequestId> requests;  // R_N, ascending
  // Member each request is steered towards inside the neighborhood.
  std::map<RequestId, AgentId> bias;
};

// Contiguous groups of `size` satellites (by phase) within each plane; the
// last group of a plane may be smaller.
std::vector<Neighborhood> partition_agents(std::span<const SatelliteSpec> agents, int size);

struct SupplyRow {
  RequestId request = 0;
  std::vector<int> by_plane;
  std::vector<int> by_neighborhood;
  int total = 0;
};

struct SupplyTable {
  std::vector<SupplyRow> rows;  // one per request, in input order
  const SupplyRow* find(RequestId r) const;
};

using CandidateFn = std::function<bool(AgentId, RequestId)>;

// supply(r, plane) = satellites of the plane with a candidate task for r.
SupplyTable compute_supply(std::span<const RequestId> requests,
                           std::span<const Neighborhood> neighborhoods,
                           std::span<const SatelliteSpec> agents, int plane_count,
                           const CandidateFn& has_candidate);

struct GndOptions {
  int n = 2;
  int neighborhood_size = 4;
  double tile_deg = 10.0;
  std::uint64_t seed = 2;
};

struct Allocation {
  std::vector<Neighborhood> neighborhoods;
  std::vector<int> neighborhood_of_agent;
  std::vector<RequestId> unallocatable;  // zero supply everywhere

  const Neighborhood& of_agent(AgentId a) const {
    return neighborhoods[static_cast<std::size_t>(neighborhood_of_agent[static_cast<std::size_t>(a)])];
  }
};

// Requests are taken in ascending total supply (equal supplies in a seeded
// random order). Each goes to the top-n neighborhoods by
//   supply_N(r) / (1 + #requests already in N whose window overlaps h(r)),
// ties to the lower neighborhood id.
Allocation allocate(std::span<const Request> requests, std::vector<Neighborhood> neighborhoods,
                    const SupplyTable& supply, std::span<const Target> targets,
                    const CandidateFn& has_candidate, const GndOptions& options);

// Decomposition heuristic interface used by the neighborhood solvers.
class Decomposer {
 public:
  virtual ~Decomposer() = default;
  // `active` is the live request set; candidates are tasks starting at or
  // after `now`.
  virtual Allocation decompose(const DcospInstance& dcosp, std::span<const RequestId> active,
                               Seconds now) const = 0;
};

class GeometricNeighborhoodDecomposition final : public Decomposer {
 public:
  explicit GeometricNeighborhoodDecomposition(GndOptions options) : options_(options) {}
  Allocation decompose(const DcospInstance& dcosp, std::span<const RequestId> active,
                       Seconds now) const override;
  const GndOptions& options() const { return options_; }

 private:
  GndOptions options_;
};

// One neighborhood holding every agent and every live request.
class WholeProblemDecomposition final : public Decomposer {
 public:
  Allocation decompose(const DcospInstance& dcosp, std::span<const RequestId> active,
                       Seconds now) const override;
};

// Candidate predicate: the agent has a task for the request starting at or
// after `now` that is feasible on its own (no downlink clash, fits its bucket).
CandidateFn future_candidates(const DcospInstance& dcosp, Seconds now);

nlohmann::json allocation_to_json(const Allocation& a);
void write_allocation(const Allocation& a, const std::string& path);

}  // namespace dcosp
