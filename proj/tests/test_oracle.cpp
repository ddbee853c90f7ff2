#include <gtest/gtest.h>

#include "dcosp/config.hpp"
#include "dcosp/generator.hpp"
#include "dcosp/oracle.hpp"
#include "dcosp/simkernel.hpp"
#include "dcosp/utility.hpp"
#include "support.hpp"

using namespace dcosp;
using dcosp::testkit::Builder;

namespace {

// x(s) = 1 iff s sits in a snapshot whose live period it overlaps.
std::vector<char> induced_assignment(const ScheduleTrace& trace, const DcospInstance& d) {
  std::vector<char> x(d.tasks.size(), 0);
  for (std::size_t t = 0; t < d.instance_count(); ++t) {
    const Seconds from = d.instance_start(t);
    const Seconds to = t + 1 < d.instance_count() ? d.instance_start(t + 1) : d.horizon.end;
    for (TaskId s : trace[t]) {
      const auto& h = d.task(s).interval;
      if (std::max(h.start, from) < std::min(h.end, to)) x[static_cast<std::size_t>(s)] = 1;
    }
  }
  return x;
}

testkit::RandomSpec small_spec() {
  testkit::RandomSpec spec;
  spec.sats_per_plane = {1, 2};
  spec.requests = 10;
  spec.events = 3;
  spec.max_tasks_per_pair = 2;
  spec.memory = 150 * kMegabyte;
  return spec;
}

}  // namespace

TEST(Collapse, StaticInstanceIsItsOwnCollapse) {
  testkit::RandomSpec spec = small_spec();
  spec.events = 0;
  const auto d = testkit::random_instance(11, spec);
  const auto c = collapse(d);
  EXPECT_EQ(c.requests, d.initial_active);
  for (const auto& t : d.tasks) {
    const bool active = std::binary_search(d.initial_active.begin(), d.initial_active.end(),
                                           t.request);
    EXPECT_EQ(c.contains(t.id), active);
  }
}

TEST(Collapse, TaskOnlyInsideRemovedPeriodIsExcluded) {
  Builder b;
  const auto r = b.request({1000, 20000});
  const auto keep = b.request({1000, 20000});
  const auto s = b.task(r, 0, 2000);
  const auto k = b.task(keep, 0, 3000);
  b.event(500, {}, {r});
  const auto d = b.build();
  const auto c = collapse(d);
  EXPECT_FALSE(c.contains(s));
  EXPECT_TRUE(c.contains(k));
  // r was active in the first instance, so it still counts as ever active.
  EXPECT_EQ(c.requests, (std::vector<RequestId>{r, keep}));
}

TEST(Collapse, DynamicUtilityEqualsCollapsedStaticUtility) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto d = testkit::random_instance(seed, small_spec());
    const auto c = collapse(d);
    Rng rng = make_rng(seed, 21);
    for (int k = 0; k < 5; ++k) {
      const auto trace = testkit::random_trace(d, rng);
      auto x = induced_assignment(trace, d);
      for (std::size_t s = 0; s < x.size(); ++s)
        if (x[s]) {
          EXPECT_TRUE(c.survives[s]) << "executed task outside the collapse";
        }
      for (std::size_t s = 0; s < x.size(); ++s) x[s] = x[s] && c.survives[s];
      EXPECT_EQ(dynamic_utility(trace, d), static_utility(x, d.tasks, c.requests));
    }
  }
}

TEST(BranchAndBound, TwoDisjointRequests) {
  Builder b;
  b.task(b.request({0, 5000}), 0, 100);
  b.task(b.request({0, 5000}), 0, 300);
  const auto d = b.build();
  const auto r = branch_and_bound(collapse(d), {});
  EXPECT_EQ(r.value, 2);
  EXPECT_TRUE(r.proven);
}

TEST(BranchAndBound, PigeonholeOnOneAgent) {
  Builder b;
  const auto r0 = b.request({0, 5000});
  const auto r1 = b.request({0, 5000});
  // All four tasks lie within 63 s of each other.
  b.task(r0, 0, 100);
  b.task(r0, 0, 110);
  b.task(r1, 0, 120);
  b.task(r1, 0, 130);
  const auto d = b.build();
  EXPECT_EQ(branch_and_bound(collapse(d), {}).value, 1);
}

TEST(BranchAndBound, MatchesExhaustiveEnumeration) {
  int nontrivial = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto spec = small_spec();
    spec.requests = 12;
    const auto d = testkit::random_instance(seed, spec);
    const auto c = collapse(d);
    const int want = testkit::exhaustive_optimum(d, c.requests, c.survives);
    const auto r = branch_and_bound(c, {});
    ASSERT_TRUE(r.proven);
    EXPECT_EQ(r.value, want) << "seed " << seed;
    EXPECT_EQ(evaluate_witness(c, r.witness), r.value);
    nontrivial += want < collapsed_upper_bound(c);
  }
  EXPECT_GT(nontrivial, 10);
}

TEST(BranchAndBound, BudgetExhaustionIsUnproven) {
  Builder b;
  for (int i = 0; i < 6; ++i) {
    const auto r = b.request({0, 5000});
    b.task(r, 0, 100 + i);
    b.task(r, 0, 400 + i);
  }
  const auto d = b.build();
  const auto c = collapse(d);
  OracleLimits lim;
  lim.node_budget = 1;
  const auto r = branch_and_bound(c, lim);
  EXPECT_FALSE(r.proven);
  EXPECT_LE(r.value, 2);
  const auto full = branch_and_bound(c, {});
  EXPECT_TRUE(full.proven);
  EXPECT_EQ(full.value, 2);
}

TEST(Swo, OptimalWhenNothingConflicts) {
  Builder b({2});
  for (int i = 0; i < 6; ++i) b.task(b.request({0, 5000}), i % 2, 100.0 * i);
  const auto d = b.build();
  const auto r = swo(collapse(d), {1, 7});
  EXPECT_EQ(r.value, 6);
}

TEST(Swo, SandwichedBetweenGreedyAndOptimum) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto d = testkit::random_instance(seed, small_spec());
    const auto c = collapse(d);
    const auto greedy = run(d, SolverKind::kGreedy, {});
    const std::vector<std::vector<TaskId>> warm = {executed_tasks(greedy.schedules, d)};
    const auto s = swo(c, {50, seed}, warm);
    const auto opt = branch_and_bound(c, {});
    ASSERT_TRUE(opt.proven);
    EXPECT_LE(greedy.metrics.dynamic_utility, s.value);
    EXPECT_LE(s.value, opt.value);
    EXPECT_EQ(evaluate_witness(c, s.witness), s.value);
  }
}

TEST(Oracle, WitnessCheckRejectsInfeasibleSets) {
  Builder b;
  const auto s0 = b.task(b.request({0, 5000}), 0, 100);
  const auto s1 = b.task(b.request({0, 5000}), 0, 130);
  const auto d = b.build();
  const auto c = collapse(d);
  const std::vector<TaskId> bad = {s0, s1};
  EXPECT_THROW(evaluate_witness(c, bad), SolverInvariantError);
}

TEST(Oracle, OnlineSolversNeverBeatTheOptimum) {
  const auto cfg = preset_config("tiny");
  const SolverParams p = SolverParams::from_config(cfg);
  for (int index = 0; index < 5; ++index) {
    const auto d = generate_scenario(cfg, index);
    const auto opt = branch_and_bound(collapse(d), {});
    ASSERT_TRUE(opt.proven);
    for (SolverKind k : all_solver_kinds())
      EXPECT_LE(run(d, k, p).metrics.dynamic_utility, opt.value) << to_string(k);
  }
}
