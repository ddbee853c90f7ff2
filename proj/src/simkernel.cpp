#include "dcosp/simkernel.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dcosp/scenario_io.hpp"

namespace dcosp {

using nlohmann::json;

namespace {

std::string describe(const Verdict& v) {
  std::ostringstream os;
  os << to_string(v.kind);
  if (v.first >= 0) os << " task " << v.first;
  if (v.second >= 0) os << " / task " << v.second;
  if (v.downlink >= 0) os << " downlink " << v.downlink;
  if (v.kind == Violation::kCapacityExceeded) os << " load " << v.load << " > " << v.limit;
  return os.str();
}

void check_step(const DcospInstance& d, const DynamicSolver& solver, std::size_t t,
                const std::vector<TaskId>& previous) {
  const auto& schedules = solver.schedules();
  for (std::size_t a = 0; a < schedules.size(); ++a) {
    const Verdict v = check_schedule(d, schedules[a].tasks(), static_cast<AgentId>(a));
    if (!v.feasible())
      throw SolverInvariantError(solver.name() + ": infeasible schedule for agent " +
                                 std::to_string(a) + " at instance " + std::to_string(t) +
                                 ": " + describe(v));
    for (TaskId s : schedules[a].tasks())
      if (!d.is_active(t, d.task(s).request))
        throw SolverInvariantError(solver.name() + ": agent " + std::to_string(a) +
                                   " holds task " + std::to_string(s) +
                                   " of inactive request at instance " + std::to_string(t));
  }
  if (t == 0) return;
  const Seconds now = d.instance_start(t);
  std::vector<TaskId> current = solver.snapshot();
  for (TaskId s : previous)
    if (d.task(s).interval.start < now && !std::binary_search(current.begin(), current.end(), s))
      throw SolverInvariantError(solver.name() + ": frozen task " + std::to_string(s) +
                                 " removed at instance " + std::to_string(t));
}

}  // namespace

RunResult run(const DcospInstance& d, DynamicSolver& solver, const StepObserver& observer) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult out;
  RunMetrics& m = out.metrics;
  m.solver = solver.name();
  m.scenario_seed = d.seeds.scenario;
  for (std::size_t t = 0; t < d.instance_count(); ++t) {
    StepReport rep = solver.step(t);
    check_step(d, solver, t, t == 0 ? std::vector<TaskId>{} : out.schedules.back());
    out.schedules.push_back(solver.snapshot());
    if (observer) observer(t, solver);
    m.iterations_per_event.push_back(static_cast<int>(rep.iterations.size()));
    m.trace.insert(m.trace.end(), rep.iterations.begin(), rep.iterations.end());
  }
  m.dynamic_utility = dynamic_utility(out.schedules, d);
  m.ever_active = static_cast<int>(d.ever_active().size());
  m.satisfaction = m.ever_active ? 100.0 * m.dynamic_utility / m.ever_active : 0.0;
  m.ledger = solver.ledger();
  m.total_ops = solver.total_ops();
  const double n = static_cast<double>(std::max<std::size_t>(1, d.agents.size()));
  m.mean_agent_ops = static_cast<double>(m.total_ops) / n;
  double ms = 0.0;
  for (double x : solver.agent_ms()) ms += x;
  m.mean_agent_ms = ms / n;
  m.stability = stability_trace(m.trace, d.instance_count());
  m.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RunResult run(const DcospInstance& d, SolverKind kind, const SolverParams& params,
              const StepObserver& observer) {
  auto solver = make_solver(kind, d, params);
  RunResult r = run(d, *solver, observer);
  r.params = params;
  return r;
}

PlanSolver::PlanSolver(const DcospInstance& dcosp, std::vector<TaskId> plan, std::string name)
    : DynamicSolver(dcosp), plan_by_agent_(dcosp.agents.size()), name_(std::move(name)) {
  std::sort(plan.begin(), plan.end());
  for (TaskId s : plan) plan_by_agent_[static_cast<std::size_t>(dcosp.task(s).agent)].push_back(s);
}

StepReport PlanSolver::step(std::size_t t) {
  if (t != next_t_) throw std::logic_error("solver steps must visit instances in order");
  ++next_t_;
  const Seconds now = dcosp_.instance_start(t);
  freeze(now);
  drop_inactive(t, now);
  for (std::size_t a = 0; a < schedules_.size(); ++a) {
    Schedule& sched = schedules_[a];
    for (TaskId s : plan_by_agent_[a]) {
      const Task& task = dcosp_.task(s);
      if (task.interval.start < now || !dcosp_.is_active(t, task.request) || sched.contains(s))
        continue;
      ++ops_[a];
      if (!sched.can_insert(s))
        throw SolverInvariantError(name_ + ": plan task " + std::to_string(s) +
                                   " does not fit agent " + std::to_string(a));
      sched.insert(s);
    }
    std::size_t pending = 0;
    for (TaskId s : sched.tasks()) pending += dcosp_.task(s).interval.start >= now ? 1 : 0;
    ledger_.record(Phase::kUplink, 1, message_bytes(pending));
  }
  StepReport rep;
  rep.converged = true;
  rep.iterations.push_back({t, 1, quality(), 0, 0, ledger_.total_bytes(), total_ops()});
  return rep;
}

std::vector<EventStability> stability_trace(const std::vector<IterationRecord>& trace,
                                            std::size_t instance_count) {
  std::vector<EventStability> out;
  for (std::size_t e = 1; e < instance_count; ++e) {
    const IterationRecord* before = nullptr;
    const IterationRecord* after = nullptr;
    for (const auto& r : trace) {
      if (r.event == e - 1) before = &r;
      if (r.event == e && !after) after = &r;
    }
    if (!before || !after) continue;
    out.push_back({e, before->quality, after->quality, before->quality - after->quality});
  }
  return out;
}

double mean_drop(const std::vector<EventStability>& s) {
  if (s.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : s) sum += e.drop;
  return sum / static_cast<double>(s.size());
}

Gap optimality_gap(const RunMetrics& run, const OracleResult& oracle) {
  Gap g;
  const double oracle_pct = run.ever_active ? 100.0 * oracle.value / run.ever_active : 0.0;
  g.percent = oracle_pct - run.satisfaction;
  g.vs_optimal = oracle.proven;
  return g;
}

int replay_dynamic_utility(const ScheduleTrace& trace, const DcospInstance& d) {
  if (trace.size() != d.instance_count())
    throw StructuralError("trace length does not match the instance count");
  std::vector<Seconds> cuts = {d.horizon.start, d.horizon.end};
  for (std::size_t t = 1; t < d.instance_count(); ++t) cuts.push_back(d.instance_start(t));
  std::vector<std::vector<TaskId>> by_start(trace.size());
  Seconds longest = 0.0;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    for (TaskId s : trace[t]) {
      const Interval& h = d.task(s).interval;
      cuts.push_back(std::clamp(h.start, d.horizon.start, d.horizon.end));
      cuts.push_back(std::clamp(h.end, d.horizon.start, d.horizon.end));
      longest = std::max(longest, h.duration());
      by_start[t].push_back(s);
    }
    std::sort(by_start[t].begin(), by_start[t].end(), [&](TaskId a, TaskId b) {
      return d.task(a).interval.start < d.task(b).interval.start;
    });
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<char> done(d.requests.size(), 0);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Seconds p = cuts[k], q = cuts[k + 1];
    const std::size_t t = d.instance_at(0.5 * (p + q));
    const auto& live = by_start[t];
    auto it = std::lower_bound(live.begin(), live.end(), p - longest, [&](TaskId s, Seconds x) {
      return d.task(s).interval.start < x;
    });
    for (; it != live.end() && d.task(*it).interval.start <= p; ++it) {
      const Task& task = d.task(*it);
      if (task.interval.end >= q) done[static_cast<std::size_t>(task.request)] = 1;
    }
  }
  int n = 0;
  for (RequestId r : d.ever_active()) n += done[static_cast<std::size_t>(r)];
  return n;
}

json metrics_to_json(const RunMetrics& m, bool include_wall) {
  json ledger;
  for (std::size_t p = 0; p < kPhaseNames.size(); ++p)
    ledger[kPhaseNames[p]] = {{"bytes", m.ledger.bytes[p]}, {"messages", m.ledger.messages[p]}};
  ledger["total_bytes"] = m.ledger.total_bytes();
  ledger["total_messages"] = m.ledger.total_messages();
  json trace = json::array();
  for (const auto& r : m.trace)
    trace.push_back({r.event, r.iteration, r.quality, r.messages, r.bytes, r.cumulative_bytes,
                     r.cumulative_ops});
  json stab = json::array();
  for (const auto& s : m.stability) stab.push_back({s.event, s.before, s.after, s.drop});
  json j = {{"solver", m.solver},
            {"scenario_seed", m.scenario_seed},
            {"dynamic_utility", m.dynamic_utility},
            {"ever_active", m.ever_active},
            {"satisfaction", m.satisfaction},
            {"ledger", ledger},
            {"total_ops", m.total_ops},
            {"mean_agent_ops", m.mean_agent_ops},
            {"iterations_per_event", m.iterations_per_event},
            {"trace_columns",
             {"event", "iteration", "quality", "messages", "bytes", "cumulative_bytes",
              "cumulative_ops"}},
            {"trace", trace},
            {"stability_columns", {"event", "before", "after", "drop"}},
            {"stability", stab}};
  if (include_wall) j["wall"] = {{"run_ms", m.wall_ms}, {"mean_agent_ms", m.mean_agent_ms}};
  return j;
}

RunMetrics metrics_from_json(const json& j) {
  RunMetrics m;
  try {
    m.solver = j.at("solver").get<std::string>();
    m.scenario_seed = j.at("scenario_seed").get<std::uint64_t>();
    m.dynamic_utility = j.at("dynamic_utility").get<int>();
    m.ever_active = j.at("ever_active").get<int>();
    m.satisfaction = j.at("satisfaction").get<double>();
    const auto& l = j.at("ledger");
    for (std::size_t p = 0; p < kPhaseNames.size(); ++p) {
      m.ledger.bytes[p] = l.at(kPhaseNames[p]).at("bytes").get<Bytes>();
      m.ledger.messages[p] = l.at(kPhaseNames[p]).at("messages").get<long long>();
    }
    m.total_ops = j.at("total_ops").get<long long>();
    m.mean_agent_ops = j.at("mean_agent_ops").get<double>();
    m.iterations_per_event = j.at("iterations_per_event").get<std::vector<int>>();
    for (const auto& r : j.at("trace"))
      m.trace.push_back({r[0].get<std::size_t>(), r[1].get<int>(), r[2].get<double>(),
                         r[3].get<long long>(), r[4].get<Bytes>(), r[5].get<Bytes>(),
                         r[6].get<long long>()});
    for (const auto& s : j.at("stability"))
      m.stability.push_back({s[0].get<std::size_t>(), s[1].get<double>(), s[2].get<double>(),
                             s[3].get<double>()});
    if (j.contains("wall")) {
      m.wall_ms = j["wall"].value("run_ms", 0.0);
      m.mean_agent_ms = j["wall"].value("mean_agent_ms", 0.0);
    }
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed metrics record: ") + e.what());
  }
  return m;
}

void write_trace_csv_header(std::ostream& out) {
  out << "event,iteration,solver,satisfaction,cumulative_bytes,ops\n";
}

void write_trace_csv(std::ostream& out, const RunMetrics& m) {
  for (const auto& r : m.trace)
    out << r.event << ',' << r.iteration << ',' << m.solver << ',' << r.quality << ','
        << r.cumulative_bytes << ',' << r.cumulative_ops << '\n';
}

json run_to_json(const RunResult& r) {
  json j = {{"format", "dcosp-run"},
            {"version", kScenarioFormatVersion},
            {"metrics", metrics_to_json(r.metrics)},
            {"schedules", r.schedules}};
  if (r.params) j["params"] = params_to_json(*r.params);
  return j;
}

RunResult run_from_json(const json& j) {
  if (j.value("format", std::string()) != "dcosp-run")
    throw StructuralError("not a dcosp run document");
  RunResult r;
  r.metrics = metrics_from_json(j.at("metrics"));
  if (j.contains("params")) r.params = params_from_json(j.at("params"));
  try {
    r.schedules = j.at("schedules").get<ScheduleTrace>();
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed schedule trace: ") + e.what());
  }
  return r;
}

void save_run(const RunResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write " + path);
  out << dump_json(run_to_json(r));
}

RunResult load_run(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open " + path);
  try {
    return run_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw StructuralError(path + ": " + e.what());
  }
}

std::vector<std::string> verify_run(const DcospInstance& d, const RunResult& r) {
  std::vector<std::string> problems;
  if (r.schedules.size() != d.instance_count()) {
    problems.push_back("trace has " + std::to_string(r.schedules.size()) + " snapshots for " +
                       std::to_string(d.instance_count()) + " instances");
    return problems;
  }
  for (std::size_t t = 0; t < r.schedules.size(); ++t) {
    std::vector<std::vector<TaskId>> per_agent(d.agents.size());
    for (TaskId s : r.schedules[t]) {
      if (s < 0 || static_cast<std::size_t>(s) >= d.tasks.size()) {
        problems.push_back("instance " + std::to_string(t) + ": unknown task " + std::to_string(s));
        continue;
      }
      const Task& task = d.task(s);
      if (!d.is_active(t, task.request))
        problems.push_back("instance " + std::to_string(t) + ": task " + std::to_string(s) +
                           " of inactive request " + std::to_string(task.request));
      per_agent[static_cast<std::size_t>(task.agent)].push_back(s);
    }
    for (std::size_t a = 0; a < per_agent.size(); ++a) {
      const Verdict v = check_schedule(d, per_agent[a], static_cast<AgentId>(a));
      if (!v.feasible())
        problems.push_back("instance " + std::to_string(t) + ": agent " + std::to_string(a) +
                           " " + describe(v));
    }
    if (t > 0) {
      const Seconds now = d.instance_start(t);
      const auto& cur = r.schedules[t];
      for (TaskId s : r.schedules[t - 1])
        if (d.task(s).interval.start < now && std::find(cur.begin(), cur.end(), s) == cur.end())
          problems.push_back("instance " + std::to_string(t) + ": frozen task " +
                             std::to_string(s) + " dropped");
    }
  }
  if (!problems.empty()) return problems;
  const int u = dynamic_utility(r.schedules, d);
  const int replayed = replay_dynamic_utility(r.schedules, d);
  if (u != replayed)
    problems.push_back("utility " + std::to_string(u) + " differs from replay " +
                       std::to_string(replayed));
  if (u != r.metrics.dynamic_utility)
    problems.push_back("recorded utility " + std::to_string(r.metrics.dynamic_utility) +
                       " differs from recomputed " + std::to_string(u));
  if (r.metrics.ever_active != static_cast<int>(d.ever_active().size()))
    problems.push_back("recorded ever-active request count differs from the scenario");
  return problems;
}

}  // namespace dcosp
