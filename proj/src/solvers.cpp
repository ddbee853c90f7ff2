#include "dcosp/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace dcosp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const std::vector<std::pair<SolverKind, const char*>>& solver_names() {
  static const std::vector<std::pair<SolverKind, const char*>> names = {
      {SolverKind::kDnss, "d-nss"},   {SolverKind::kZeroNss, "0-nss"},
      {SolverKind::kDdsa, "d-dsa"},   {SolverKind::kZeroDsa, "0-dsa"},
      {SolverKind::kGreedy, "greedy"}, {SolverKind::kRandom, "random"}};
  return names;
}

}  // namespace

std::string to_string(SolverKind k) {
  for (const auto& [kind, name] : solver_names())
    if (kind == k) return name;
  return "?";
}

SolverKind parse_solver(const std::string& name) {
  for (const auto& [kind, n] : solver_names())
    if (name == n) return kind;
  throw StructuralError("unknown solver '" + name + "'");
}

const std::vector<SolverKind>& all_solver_kinds() {
  static const std::vector<SolverKind> kinds = [] {
    std::vector<SolverKind> out;
    for (const auto& [kind, name] : solver_names()) out.push_back(kind);
    return out;
  }();
  return kinds;
}

SolverParams SolverParams::from_config(const ScenarioConfig& c) {
  SolverParams p;
  p.p_u = c.p_u;
  p.max_iters = c.max_iters;
  p.stop_on_convergence = c.stop_on_convergence;
  p.w_counts_self = c.w_counts_self;
  p.repair_skip_covered = c.repair_skip_covered;
  p.workers = c.workers;
  p.gnd.n = c.gnd_n;
  p.gnd.neighborhood_size = c.neighborhood_size;
  p.gnd.seed = c.seeds.gnd;
  p.seeds = c.seeds;
  return p;
}

nlohmann::json params_to_json(const SolverParams& p) {
  return {{"p_u", p.p_u},
          {"max_iters", p.max_iters},
          {"stop_on_convergence", p.stop_on_convergence},
          {"w_counts_self", p.w_counts_self},
          {"repair_skip_covered", p.repair_skip_covered},
          {"workers", p.workers},
          {"gnd",
           {{"n", p.gnd.n},
            {"neighborhood_size", p.gnd.neighborhood_size},
            {"tile_deg", p.gnd.tile_deg},
            {"seed", p.gnd.seed}}},
          {"seeds", p.seeds}};
}

SolverParams params_from_json(const nlohmann::json& j) {
  SolverParams p;
  try {
    p.p_u = j.value("p_u", p.p_u);
    p.max_iters = j.value("max_iters", p.max_iters);
    p.stop_on_convergence = j.value("stop_on_convergence", p.stop_on_convergence);
    p.w_counts_self = j.value("w_counts_self", p.w_counts_self);
    p.repair_skip_covered = j.value("repair_skip_covered", p.repair_skip_covered);
    p.workers = j.value("workers", p.workers);
    if (j.contains("gnd")) {
      const auto& g = j.at("gnd");
      p.gnd.n = g.value("n", p.gnd.n);
      p.gnd.neighborhood_size = g.value("neighborhood_size", p.gnd.neighborhood_size);
      p.gnd.tile_deg = g.value("tile_deg", p.gnd.tile_deg);
      p.gnd.seed = g.value("seed", p.gnd.seed);
    }
    if (j.contains("seeds")) j.at("seeds").get_to(p.seeds);
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed solver parameters: ") + e.what());
  }
  return p;
}

double assign_probability(bool executed, bool assigned, int w, double p_u) {
  if (executed) return 0.0;
  if (!assigned) return w == 0 ? 1.0 : 0.0;
  return w == 0 ? 1.0 - p_u : 1.0 / w;
}

bool stochastic_update(bool executed, bool assigned, int w, double p_u, Rng& rng,
                       long long* draws) {
  const double p = assign_probability(executed, assigned, w, p_u);
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  if (draws) ++*draws;
  return uniform01(rng) < p;
}

InsertResult schedule_insert(Schedule& sched, const DcospInstance& dcosp,
                             std::span<const TaskId> candidates, Seconds now) {
  InsertResult res;
  for (TaskId c : candidates) {
    if (dcosp.task(c).interval.start < now) continue;
    ++res.checks;
    if (sched.can_insert(c)) {
      sched.insert(c);
      res.inserted = true;
      res.task = c;
      return res;
    }
  }
  for (TaskId c : candidates) {
    const Task& task = dcosp.task(c);
    if (task.interval.start < now) continue;
    TaskId victim = -1;
    double best = 0.0;
    for (TaskId s : sched.tasks()) {
      const Task& o = dcosp.task(s);
      if (o.interval.start < now) continue;
      const double dist = std::abs(o.interval.start - task.interval.start);
      if (victim < 0 || dist < best) {
        victim = s;
        best = dist;
        continue;
      }
      if (dist > best) continue;
      const Task& v = dcosp.task(victim);
      if (o.volume > v.volume || (o.volume == v.volume && o.id < v.id)) victim = s;
    }
    if (victim < 0) break;
    sched.erase(victim);
    ++res.checks;
    if (sched.can_insert(c)) {
      sched.insert(c);
      res.inserted = true;
      res.task = c;
      res.displaced = victim;
      return res;
    }
    sched.insert(victim);
  }
  return res;
}

long long repair(Schedule& sched, const DcospInstance& dcosp, std::span<const TaskId> candidates,
                 const std::vector<char>& keep, const std::vector<char>& excluded,
                 const std::vector<char>& biased, Seconds now, Rng& rng) {
  auto wanted = [&](RequestId r) {
    const auto i = static_cast<std::size_t>(r);
    return keep[i] && !excluded[i];
  };
  std::vector<TaskId> drop;
  for (TaskId s : sched.tasks()) {
    const Task& t = dcosp.task(s);
    if (t.interval.start >= now && !wanted(t.request)) drop.push_back(s);
  }
  for (TaskId s : drop) sched.erase(s);

  std::vector<TaskId> order;
  for (TaskId s : candidates) {
    const Task& t = dcosp.task(s);
    if (t.interval.start >= now && wanted(t.request)) order.push_back(s);
  }
  shuffle(std::span(order), rng);
  std::stable_partition(order.begin(), order.end(), [&](TaskId s) {
    return biased[static_cast<std::size_t>(dcosp.task(s).request)] != 0;
  });
  long long checks = 0;
  for (TaskId s : order) {
    if (sched.has_request(dcosp.task(s).request)) continue;
    ++checks;
    if (sched.can_insert(s)) sched.insert(s);
  }
  return checks;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& f) {
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + w - 1) / w;
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k * chunk; i < std::min(n, (k + 1) * chunk); ++i) f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

DynamicSolver::DynamicSolver(const DcospInstance& dcosp) : dcosp_(dcosp) {
  const auto n = dcosp.agents.size();
  models_.reserve(n);
  for (const auto& a : dcosp.agents) models_.emplace_back(dcosp, a.id);
  schedules_.reserve(n);
  for (const auto& m : models_) schedules_.emplace_back(dcosp, m);
  executed_.assign(n, std::vector<char>(dcosp.requests.size(), 0));
  ops_.assign(n, 0);
  ms_.assign(n, 0.0);
}

long long DynamicSolver::total_ops() const {
  long long s = 0;
  for (long long o : ops_) s += o;
  return s;
}

double DynamicSolver::quality() const {
  const auto& ever = dcosp_.ever_active();
  if (ever.empty()) return 0.0;
  std::vector<char> seen(dcosp_.requests.size(), 0);
  for (const auto& s : schedules_)
    for (const auto& [r, task] : s.by_request()) seen[static_cast<std::size_t>(r)] = 1;
  std::size_t k = 0;
  for (RequestId r : ever) k += seen[static_cast<std::size_t>(r)] ? 1 : 0;
  return 100.0 * static_cast<double>(k) / static_cast<double>(ever.size());
}

std::vector<TaskId> DynamicSolver::snapshot() const {
  std::vector<TaskId> out;
  for (const auto& s : schedules_) out.insert(out.end(), s.tasks().begin(), s.tasks().end());
  std::sort(out.begin(), out.end());
  return out;
}

void DynamicSolver::freeze(Seconds now) {
  for (std::size_t a = 0; a < schedules_.size(); ++a)
    for (TaskId s : schedules_[a].tasks()) {
      const Task& t = dcosp_.task(s);
      if (t.interval.start >= now) break;
      executed_[a][static_cast<std::size_t>(t.request)] = 1;
    }
}

void DynamicSolver::drop_inactive(std::size_t t, Seconds now) {
  for (auto& sched : schedules_) {
    std::vector<TaskId> drop;
    for (TaskId s : sched.tasks()) {
      const Task& task = dcosp_.task(s);
      if (task.interval.start >= now && !dcosp_.is_active(t, task.request)) drop.push_back(s);
    }
    for (TaskId s : drop) sched.erase(s);
  }
}

StochasticSearchSolver::StochasticSearchSolver(const DcospInstance& dcosp, SolverKind kind,
                                               const SolverParams& params)
    : DynamicSolver(dcosp), kind_(kind), params_(params) {
  switch (kind) {
    case SolverKind::kDnss:
    case SolverKind::kZeroNss:
      decomposer_ = std::make_unique<GeometricNeighborhoodDecomposition>(params.gnd);
      break;
    case SolverKind::kDdsa:
    case SolverKind::kZeroDsa:
      decomposer_ = std::make_unique<WholeProblemDecomposition>();
      break;
    default:
      throw StructuralError("not a stochastic search solver: " + to_string(kind));
  }
  for (const auto& a : dcosp.agents) {
    search_rng_.push_back(make_rng(params.seeds.solver, static_cast<std::uint64_t>(a.id)));
    repair_rng_.push_back(make_rng(params.seeds.repair, static_cast<std::uint64_t>(a.id)));
  }
  assigned_.assign(dcosp.agents.size(), std::vector<char>(dcosp.requests.size(), 0));
  seen_ = assigned_;
  heard_ = assigned_;
}

StepReport StochasticSearchSolver::step(std::size_t t) {
  if (t != next_t_) throw std::logic_error("solver steps must visit instances in order");
  ++next_t_;
  const Seconds now = dcosp_.instance_start(t);
  const std::size_t n_agents = dcosp_.agents.size();
  const std::size_t n_requests = dcosp_.requests.size();
  freeze(now);

  if (kind_ == SolverKind::kZeroNss || kind_ == SolverKind::kZeroDsa) {
    for (std::size_t a = 0; a < n_agents; ++a) {
      std::vector<TaskId> drop;
      for (TaskId s : schedules_[a].tasks())
        if (dcosp_.task(s).interval.start >= now) drop.push_back(s);
      for (TaskId s : drop) schedules_[a].erase(s);
      std::fill(assigned_[a].begin(), assigned_[a].end(), 0);
      std::fill(seen_[a].begin(), seen_[a].end(), 0);
    }
  }

  std::vector<RequestId> active;
  for (std::size_t r = 0; r < n_requests; ++r)
    if (dcosp_.is_active(t, static_cast<RequestId>(r))) active.push_back(static_cast<RequestId>(r));
  allocation_ = decomposer_->decompose(dcosp_, active, now);
  ledger_.record(Phase::kDecomposition, 0, 0);

  const auto& hoods = allocation_.neighborhoods;
  const std::size_t n_hoods = hoods.size();
  std::vector<std::vector<char>> in_hood(n_hoods, std::vector<char>(n_requests, 0));
  std::vector<std::vector<char>> hood_exec(n_hoods, std::vector<char>(n_requests, 0));
  for (std::size_t h = 0; h < n_hoods; ++h) {
    for (RequestId r : hoods[h].requests) in_hood[h][static_cast<std::size_t>(r)] = 1;
    for (AgentId a : hoods[h].members)
      for (std::size_t r = 0; r < n_requests; ++r)
        if (executed_[static_cast<std::size_t>(a)][r]) hood_exec[h][r] = 1;
  }
  auto hood_of = [&](std::size_t a) {
    return static_cast<std::size_t>(allocation_.neighborhood_of_agent[a]);
  };

  // Future candidate tasks per agent, grouped by request (ascending id).
  std::vector<std::vector<std::pair<RequestId, std::vector<TaskId>>>> cands(n_agents);
  std::vector<std::vector<TaskId>> flat(n_agents);
  for (std::size_t a = 0; a < n_agents; ++a) {
    const auto& mask = in_hood[hood_of(a)];
    std::map<RequestId, std::vector<TaskId>> by_r;
    for (TaskId s : dcosp_.tasks_of_agent(static_cast<AgentId>(a))) {
      const Task& task = dcosp_.task(s);
      if (task.interval.start < now || !mask[static_cast<std::size_t>(task.request)]) continue;
      by_r[task.request].push_back(s);
      flat[a].push_back(s);
    }
    cands[a].assign(by_r.begin(), by_r.end());
  }

  parallel_for(n_agents, params_.workers, [&](std::size_t a) {
    const auto t0 = Clock::now();
    const std::size_t h = hood_of(a);
    std::vector<char> biased(n_requests, 0);
    for (const auto& [r, agent] : hoods[h].bias)
      if (static_cast<std::size_t>(agent) == a) biased[static_cast<std::size_t>(r)] = 1;
    std::vector<TaskId> fresh;
    if (params_.repair_skip_covered) {
      for (TaskId s : flat[a])
        if (const auto r = static_cast<std::size_t>(dcosp_.task(s).request);
            !seen_[a][r] || !heard_[a][r])
          fresh.push_back(s);
    } else {
      fresh = flat[a];
    }
    ops_[a] += repair(schedules_[a], dcosp_, fresh, in_hood[h], hood_exec[h], biased, now,
                      repair_rng_[a]);
    seen_[a] = in_hood[h];
    std::fill(assigned_[a].begin(), assigned_[a].end(), 0);
    for (const auto& [r, task] : schedules_[a].by_request())
      if (in_hood[h][static_cast<std::size_t>(r)]) assigned_[a][static_cast<std::size_t>(r)] = 1;
    ms_[a] += elapsed_ms(t0);
  });
  ledger_.record(Phase::kRepair, 0, 0);

  StepReport report;
  std::vector<char> searching(n_hoods, 1);
  std::vector<std::vector<int>> count(n_hoods, std::vector<int>(n_requests, 0));
  std::vector<std::vector<RequestId>> flagged(n_agents);
  std::vector<char> changed(n_agents, 0);
  for (int it = 1; it <= params_.max_iters; ++it) {
    if (std::none_of(searching.begin(), searching.end(), [](char c) { return c != 0; })) {
      report.converged = true;
      break;
    }
    // Message exchange: state as left by the previous iteration.
    long long msgs = 0;
    Bytes bytes = 0;
    std::vector<std::size_t> agents;
    for (std::size_t h = 0; h < n_hoods; ++h) {
      if (!searching[h]) continue;
      for (RequestId r : hoods[h].requests) count[h][static_cast<std::size_t>(r)] = 0;
      const long long peers = static_cast<long long>(hoods[h].members.size()) - 1;
      for (AgentId m : hoods[h].members) {
        const auto a = static_cast<std::size_t>(m);
        agents.push_back(a);
        flagged[a].clear();
        for (const auto& [r, task] : schedules_[a].by_request())
          if (in_hood[h][static_cast<std::size_t>(r)]) {
            flagged[a].push_back(r);
            ++count[h][static_cast<std::size_t>(r)];
          }
        msgs += peers;
        bytes += peers * message_bytes(flagged[a].size());
        ops_[a] += peers;
      }
    }
    ledger_.record(Phase::kSearch, msgs, bytes);
    for (std::size_t h = 0; h < n_hoods; ++h) {
      if (!searching[h]) continue;
      for (AgentId m : hoods[h].members) {
        auto& heard = heard_[static_cast<std::size_t>(m)];
        std::fill(heard.begin(), heard.end(), 0);
        for (RequestId r : hoods[h].requests)
          heard[static_cast<std::size_t>(r)] = count[h][static_cast<std::size_t>(r)] > 0;
      }
    }

    parallel_for(agents.size(), params_.workers, [&](std::size_t i) {
      const std::size_t a = agents[i];
      const auto t0 = Clock::now();
      const std::size_t h = hood_of(a);
      Schedule& sched = schedules_[a];
      Rng& rng = search_rng_[a];
      std::vector<std::size_t> order(cands[a].size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      shuffle(std::span(order), rng);
      ops_[a] += static_cast<long long>(order.size());
      bool dirty = false;
      for (std::size_t k : order) {
        const auto& [r, tasks] = cands[a][k];
        const auto ri = static_cast<std::size_t>(r);
        const bool own =
            std::binary_search(flagged[a].begin(), flagged[a].end(), r);
        const int w = count[h][ri] - (params_.w_counts_self || !own ? 0 : 1);
        const bool was = assigned_[a][ri] != 0;
        const bool now_assigned =
            stochastic_update(hood_exec[h][ri] != 0, was, w, params_.p_u, rng, &ops_[a]);
        if (now_assigned != was) {
          assigned_[a][ri] = now_assigned ? 1 : 0;
          dirty = true;
        }
        const auto held = sched.task_for(r);
        if (!now_assigned) {
          if (held && dcosp_.task(*held).interval.start >= now) {
            sched.erase(*held);
            dirty = true;
          }
        } else if (!held) {
          const InsertResult res = schedule_insert(sched, dcosp_, tasks, now);
          ops_[a] += res.checks;
          if (res.inserted) dirty = true;
        }
      }
      changed[a] = dirty ? 1 : 0;
      ms_[a] += elapsed_ms(t0);
    });

    bool any_change = false;
    for (std::size_t h = 0; h < n_hoods; ++h) {
      if (!searching[h]) continue;
      bool c = false;
      for (AgentId m : hoods[h].members) c = c || changed[static_cast<std::size_t>(m)];
      any_change = any_change || c;
      if (!c && params_.stop_on_convergence) searching[h] = 0;
    }
    if (!any_change) report.converged = true;
    report.iterations.push_back(
        {t, it, quality(), msgs, bytes, ledger_.total_bytes(), total_ops()});
  }
  return report;
}

SinglePassSolver::SinglePassSolver(const DcospInstance& dcosp, bool randomized,
                                   const SolverParams& params)
    : DynamicSolver(dcosp), randomized_(randomized), workers_(params.workers) {
  for (const auto& a : dcosp.agents)
    rng_.push_back(make_rng(params.seeds.random_solver, static_cast<std::uint64_t>(a.id)));
}

StepReport SinglePassSolver::step(std::size_t t) {
  if (t != next_t_) throw std::logic_error("solver steps must visit instances in order");
  ++next_t_;
  const Seconds now = dcosp_.instance_start(t);
  freeze(now);
  drop_inactive(t, now);
  parallel_for(schedules_.size(), workers_, [&](std::size_t a) {
    const auto t0 = Clock::now();
    std::vector<TaskId> order;
    for (TaskId s : dcosp_.tasks_of_agent(static_cast<AgentId>(a))) {
      const Task& task = dcosp_.task(s);
      if (task.interval.start >= now && dcosp_.is_active(t, task.request)) order.push_back(s);
    }
    if (randomized_) {
      shuffle(std::span(order), rng_[a]);
      ops_[a] += static_cast<long long>(order.size());
    }
    Schedule& sched = schedules_[a];
    for (TaskId s : order) {
      if (sched.has_request(dcosp_.task(s).request)) continue;
      ++ops_[a];
      if (sched.can_insert(s)) sched.insert(s);
    }
    ms_[a] += elapsed_ms(t0);
  });
  StepReport report;
  report.converged = true;
  report.iterations.push_back({t, 1, quality(), 0, 0, ledger_.total_bytes(), total_ops()});
  return report;
}

std::unique_ptr<DynamicSolver> make_solver(SolverKind kind, const DcospInstance& dcosp,
                                           const SolverParams& params) {
  switch (kind) {
    case SolverKind::kGreedy:
      return std::make_unique<SinglePassSolver>(dcosp, false, params);
    case SolverKind::kRandom:
      return std::make_unique<SinglePassSolver>(dcosp, true, params);
    default:
      return std::make_unique<StochasticSearchSolver>(dcosp, kind, params);
  }
}

}  // namespace dcosp
