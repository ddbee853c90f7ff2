#include <gtest/gtest.h>

#include <set>

#include "dcosp/config.hpp"
#include "dcosp/decomposition.hpp"
#include "dcosp/generator.hpp"
#include "dcosp/geometry.hpp"
#include "dcosp/solvers.hpp"
#include "support.hpp"

using namespace dcosp;

namespace {

std::vector<SatelliteSpec> plane_agents(std::vector<int> counts) {
  std::vector<SatelliteSpec> out;
  for (std::size_t p = 0; p < counts.size(); ++p)
    for (int i = 0; i < counts[p]; ++i)
      out.push_back({static_cast<AgentId>(out.size()), static_cast<int>(p), i, 45.0, kGigabyte});
  return out;
}

void expect_partition(const std::vector<Neighborhood>& hoods, std::size_t agents) {
  std::set<AgentId> seen;
  for (const auto& n : hoods)
    for (AgentId a : n.members) EXPECT_TRUE(seen.insert(a).second) << "agent " << a;
  EXPECT_EQ(seen.size(), agents);
}

}  // namespace

TEST(Partition, SizeOneIsolatesEveryAgent) {
  const auto agents = plane_agents({4, 3});
  const auto hoods = partition_agents(agents, 1);
  EXPECT_EQ(hoods.size(), 7u);
  for (const auto& n : hoods) EXPECT_EQ(n.members.size(), 1u);
  expect_partition(hoods, agents.size());
}

TEST(Partition, NinetyFiveByTen) {
  const auto agents = plane_agents({95});
  const auto hoods = partition_agents(agents, 10);
  ASSERT_EQ(hoods.size(), 10u);
  int tens = 0, fives = 0;
  for (const auto& n : hoods) {
    tens += n.members.size() == 10;
    fives += n.members.size() == 5;
  }
  EXPECT_EQ(tens, 9);
  EXPECT_EQ(fives, 1);
  expect_partition(hoods, agents.size());
}

TEST(Partition, GroupsAreContiguousWithinOnePlane) {
  const auto agents = plane_agents({6, 14, 5});
  const auto hoods = partition_agents(agents, 4);
  expect_partition(hoods, agents.size());
  for (const auto& n : hoods) {
    const int plane = agents[static_cast<std::size_t>(n.members.front())].plane;
    for (std::size_t k = 0; k < n.members.size(); ++k) {
      const auto& a = agents[static_cast<std::size_t>(n.members[k])];
      EXPECT_EQ(a.plane, plane);
      if (k) {
        EXPECT_EQ(a.index_in_plane,
                  agents[static_cast<std::size_t>(n.members[k - 1])].index_in_plane + 1);
      }
    }
  }
  EXPECT_THROW(partition_agents(agents, 0), StructuralError);
}

TEST(Supply, OnePlaneOfFourteen) {
  const auto agents = plane_agents({14, 12});
  const auto hoods = partition_agents(agents, 4);
  const std::vector<RequestId> reqs = {0, 1};
  auto has = [&](AgentId a, RequestId r) {
    return r == 0 && agents[static_cast<std::size_t>(a)].plane == 0;
  };
  const auto t = compute_supply(reqs, hoods, agents, 2, has);
  EXPECT_EQ(t.find(0)->total, 14);
  EXPECT_EQ(t.find(0)->by_plane, (std::vector<int>{14, 0}));
  EXPECT_EQ(t.find(1)->total, 0);
  int sum = 0;
  for (int s : t.find(0)->by_neighborhood) sum += s;
  EXPECT_EQ(sum, 14);
}

TEST(Supply, MonotoneInOffNadir) {
  const auto c = walker_constellation();
  std::vector<OrbitalPlane> planes = {c.planes[0], c.planes[6]};
  std::vector<SatelliteSpec> narrow;
  for (int p = 0; p < 2; ++p)
    for (int i = 0; i < 3; ++i)
      narrow.push_back({static_cast<AgentId>(narrow.size()), p, i, 20.0, kGigabyte});
  auto wide = narrow;
  for (auto& a : wide) a.max_off_nadir_deg = 45.0;
  Rng rng = make_rng(8);
  const auto targets = synthetic_targets(8, {30, 50, -10, 20}, rng);
  std::vector<RequestId> reqs;
  for (const auto& t : targets) reqs.push_back(t.id);
  const Interval h{0, 6 * 3600.0};
  auto pred = [&](const std::vector<SatelliteSpec>& sats) {
    return [&, sats](AgentId a, RequestId r) {
      const auto& s = sats[static_cast<std::size_t>(a)];
      return !access_windows(planes[static_cast<std::size_t>(s.plane)], s,
                             targets[static_cast<std::size_t>(r)], h)
                  .empty();
    };
  };
  const auto hoods = partition_agents(narrow, 2);
  const auto a = compute_supply(reqs, hoods, narrow, 2, pred(narrow));
  const auto b = compute_supply(reqs, hoods, wide, 2, pred(wide));
  int grew = 0;
  for (RequestId r : reqs) {
    EXPECT_LE(a.find(r)->total, b.find(r)->total);
    grew += b.find(r)->total > a.find(r)->total;
  }
  EXPECT_GT(grew, 0);
}

TEST(Allocate, EmptyNeighborhoodBeatsConflictedOne) {
  // Two single-agent neighborhoods. r0 can only go to N0; r1 overlaps r0 in
  // time and has equal supply in both, so its scores are 1/(1+1) for N0 and
  // 1/(1+0) for N1.
  const auto agents = plane_agents({2});
  const std::vector<Request> reqs = {{0, 0, {0, 100}}, {1, 1, {50, 150}}};
  const std::vector<Target> targets = {{0, 0, 0}, {1, 0, 0}};
  auto has = [](AgentId a, RequestId r) { return r == 1 || a == 0; };
  const std::vector<RequestId> ids = {0, 1};
  const auto hoods = partition_agents(agents, 1);
  const auto table = compute_supply(ids, hoods, agents, 1, has);
  GndOptions opt;
  opt.n = 1;
  const auto alloc = allocate(reqs, hoods, table, targets, has, opt);
  EXPECT_EQ(alloc.neighborhoods[0].requests, std::vector<RequestId>{0});
  EXPECT_EQ(alloc.neighborhoods[1].requests, std::vector<RequestId>{1});
}

namespace {

struct Decomposed {
  DcospInstance d;
  Allocation alloc;
  CandidateFn has;
};

Decomposed decompose_tiny(int index, int n, int size) {
  auto c = preset_config("tiny");
  Decomposed out{generate_scenario(c, index), {}, {}};
  GndOptions opt;
  opt.n = n;
  opt.neighborhood_size = size;
  out.has = future_candidates(out.d, 0.0);
  out.alloc = GeometricNeighborhoodDecomposition(opt).decompose(out.d, out.d.initial_active, 0.0);
  return out;
}

}  // namespace

TEST(Allocate, TopNSaturatesWhenNCoversAllNeighborhoods) {
  const auto x = decompose_tiny(0, 100, 2);
  for (RequestId r : x.d.initial_active)
    for (const auto& n : x.alloc.neighborhoods) {
      bool positive = false;
      for (AgentId a : n.members) positive = positive || x.has(a, r);
      const bool held = std::binary_search(n.requests.begin(), n.requests.end(), r);
      EXPECT_EQ(held, positive);
    }
}

TEST(Allocate, EachRequestInMinNPositiveNeighborhoods) {
  for (int n : {1, 2, 3})
    for (int index = 0; index < 5; ++index) {
      const auto x = decompose_tiny(index, n, 2);
      for (RequestId r : x.d.initial_active) {
        int positive = 0, held = 0;
        for (const auto& hood : x.alloc.neighborhoods) {
          bool p = false;
          for (AgentId a : hood.members) p = p || x.has(a, r);
          positive += p;
          if (std::binary_search(hood.requests.begin(), hood.requests.end(), r)) {
            ++held;
            // Every allocated request has a member able to serve it, and
            // the bias points at one of those.
            EXPECT_TRUE(p);
            const AgentId b = hood.bias.at(r);
            EXPECT_TRUE(x.has(b, r));
          }
        }
        EXPECT_EQ(held, std::min(n, positive));
        const bool flagged = std::binary_search(x.alloc.unallocatable.begin(),
                                                x.alloc.unallocatable.end(), r);
        EXPECT_EQ(flagged, positive == 0);
      }
    }
}

TEST(Allocate, Deterministic) {
  const auto a = decompose_tiny(3, 2, 2);
  const auto b = decompose_tiny(3, 2, 2);
  EXPECT_EQ(allocation_to_json(a.alloc).dump(), allocation_to_json(b.alloc).dump());
}

TEST(Allocate, LocalityOnSmallWalker) {
  auto c = preset_config("small-walker");
  const auto d = generate_scenario(c, 0);
  GndOptions opt;
  opt.n = c.gnd_n;
  opt.neighborhood_size = c.neighborhood_size;
  const auto alloc = GeometricNeighborhoodDecomposition(opt).decompose(d, d.initial_active, 0.0);
  const double R = static_cast<double>(d.initial_active.size());
  const double hoods = static_cast<double>(alloc.neighborhoods.size());
  std::size_t max_rn = 0;
  for (const auto& n : alloc.neighborhoods) max_rn = std::max(max_rn, n.requests.size());
  // Slack: a tenth of |R| on top of the even share.
  EXPECT_LE(static_cast<double>(max_rn), R * opt.n * 2.0 / hoods + 0.1 * R);
  EXPECT_LT(static_cast<double>(max_rn), R);
}

TEST(Decomposition, SendsNoMessages) {
  // Decomposition is recomputed locally each event: the decomposition
  // ledger slot must stay empty for the neighborhood solvers.
  const auto d = generate_scenario(preset_config("tiny"), 0);
  for (SolverKind k : {SolverKind::kDnss, SolverKind::kZeroNss}) {
    auto s = make_solver(k, d, SolverParams::from_config(preset_config("tiny")));
    for (std::size_t t = 0; t < d.instance_count(); ++t) s->step(t);
    EXPECT_EQ(s->ledger().bytes[static_cast<std::size_t>(Phase::kDecomposition)], 0);
    EXPECT_EQ(s->ledger().messages[static_cast<std::size_t>(Phase::kDecomposition)], 0);
  }
}

TEST(Decomposition, WholeProblemHoldsEverything) {
  const auto d = generate_scenario(preset_config("tiny"), 0);
  const auto a = WholeProblemDecomposition().decompose(d, d.initial_active, 0.0);
  ASSERT_EQ(a.neighborhoods.size(), 1u);
  EXPECT_EQ(a.neighborhoods[0].members.size(), d.agents.size());
  EXPECT_EQ(a.neighborhoods[0].requests, d.initial_active);
}

TEST(Decomposition, FutureCandidatesIgnorePastAndInfeasibleTasks) {
  testkit::Builder b({2}, 86400.0, 60 * kMegabyte);
  const auto r0 = b.request({0, 10000});
  const auto r1 = b.request({0, 10000});
  const auto r2 = b.request({0, 10000});
  b.task(r0, 0, 100);                    // in the past at now = 500
  b.task(r1, 0, 1000, 70 * kMegabyte);   // larger than memory
  b.task(r2, 1, 2000);                   // collides with agent 1's downlink
  b.task(r2, 0, 3000);
  b.downlink(1, {2050, 2200}, kGigabyte);
  const auto d = b.build();
  const auto has = future_candidates(d, 500.0);
  EXPECT_FALSE(has(0, r0));
  EXPECT_FALSE(has(0, r1));
  EXPECT_FALSE(has(1, r2));
  EXPECT_TRUE(has(0, r2));
  EXPECT_TRUE(future_candidates(d, 0.0)(0, r0));
}
