#include "dcosp/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace dcosp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Schedule> empty_schedules(const CollapsedInstance& c) {
  std::vector<Schedule> out;
  out.reserve(c.models.size());
  for (const auto& m : c.models) out.emplace_back(*c.dcosp, m);
  return out;
}

// Candidates of each request that fit on an empty schedule.
std::vector<std::vector<TaskId>> alone_feasible(const CollapsedInstance& c) {
  auto empty = empty_schedules(c);
  std::vector<std::vector<TaskId>> out(c.dcosp->requests.size());
  for (RequestId r : c.requests)
    for (TaskId s : c.tasks_by_request[static_cast<std::size_t>(r)])
      if (empty[static_cast<std::size_t>(c.dcosp->task(s).agent)].can_insert(s))
        out[static_cast<std::size_t>(r)].push_back(s);
  return out;
}

}  // namespace

CollapsedInstance collapse(const DcospInstance& d) {
  CollapsedInstance c;
  c.dcosp = &d;
  c.requests = d.ever_active();
  c.survives.assign(d.tasks.size(), 0);
  c.tasks_by_request.assign(d.requests.size(), {});
  for (const Task& s : d.tasks) {
    for (std::size_t t = 0; t < d.instance_count(); ++t) {
      if (d.is_active(t, s.request) && s.interval.overlaps(d.static_window(t))) {
        c.survives[static_cast<std::size_t>(s.id)] = 1;
        break;
      }
    }
    if (c.survives[static_cast<std::size_t>(s.id)]) {
      c.tasks.push_back(s.id);
      c.tasks_by_request[static_cast<std::size_t>(s.request)].push_back(s.id);
    }
  }
  for (auto& v : c.tasks_by_request)
    std::sort(v.begin(), v.end(), [&](TaskId a, TaskId b) {
      const auto& ta = d.task(a);
      const auto& tb = d.task(b);
      return ta.interval.start != tb.interval.start ? ta.interval.start < tb.interval.start
                                                    : a < b;
    });
  c.models.reserve(d.agents.size());
  for (const auto& a : d.agents) c.models.emplace_back(d, a.id);
  return c;
}

int evaluate_witness(const CollapsedInstance& c, std::span<const TaskId> tasks) {
  const DcospInstance& d = *c.dcosp;
  std::vector<std::vector<Task>> per_agent(d.agents.size());
  for (TaskId s : tasks) {
    if (s < 0 || static_cast<std::size_t>(s) >= d.tasks.size() || !c.contains(s))
      throw SolverInvariantError("witness task " + std::to_string(s) + " is not in the collapsed instance");
    per_agent[static_cast<std::size_t>(d.task(s).agent)].push_back(d.task(s));
  }
  for (std::size_t a = 0; a < per_agent.size(); ++a) {
    std::vector<Downlink> dls;
    for (DownlinkId id : d.downlinks_of_agent(static_cast<AgentId>(a)))
      dls.push_back(d.downlinks[static_cast<std::size_t>(id)]);
    const Verdict v = check_constraints(per_agent[a], d.agents[a], dls);
    if (!v.feasible())
      throw SolverInvariantError("witness infeasible for agent " + std::to_string(a) + ": " +
                                 to_string(v.kind));
  }
  std::vector<char> sat(d.requests.size(), 0);
  for (TaskId s : tasks) sat[static_cast<std::size_t>(d.task(s).request)] = 1;
  int n = 0;
  for (RequestId r : c.requests) n += sat[static_cast<std::size_t>(r)];
  return n;
}

int collapsed_upper_bound(const CollapsedInstance& c) {
  const auto cands = alone_feasible(c);
  int n = 0;
  for (RequestId r : c.requests) n += cands[static_cast<std::size_t>(r)].empty() ? 0 : 1;
  return n;
}

nlohmann::json to_json(const OracleResult& r) {
  return {{"method", r.method},       {"value", r.value},     {"proven", r.proven},
          {"nodes", r.nodes},         {"rounds", r.rounds},   {"upper_bound", r.upper_bound},
          {"witness_size", r.witness.size()}};
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const CollapsedInstance& c, const OracleLimits& limits)
      : c_(c), limits_(limits), schedules_(empty_schedules(c)) {
    const auto cands = alone_feasible(c);
    for (RequestId r : c.requests)
      if (!cands[static_cast<std::size_t>(r)].empty()) {
        order_.push_back(r);
        cands_.push_back(cands[static_cast<std::size_t>(r)]);
      }
    std::vector<std::size_t> idx(order_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return cands_[a].size() < cands_[b].size();
    });
    std::vector<RequestId> o;
    std::vector<std::vector<TaskId>> cs;
    for (std::size_t i : idx) {
      o.push_back(order_[i]);
      cs.push_back(std::move(cands_[i]));
    }
    order_ = std::move(o);
    cands_ = std::move(cs);
  }

  int upper_bound() const { return static_cast<int>(order_.size()); }

  void seed(int value, std::vector<TaskId> witness) {
    if (value > best_) {
      best_ = value;
      best_witness_ = std::move(witness);
    }
  }

  void run() {
    start_ = Clock::now();
    dfs(0, 0);
  }

  bool aborted() const { return aborted_; }
  long long nodes() const { return nodes_; }
  int best() const { return best_; }
  const std::vector<TaskId>& witness() const { return best_witness_; }

 private:
  Schedule& sched_of(TaskId s) {
    return schedules_[static_cast<std::size_t>(c_.dcosp->task(s).agent)];
  }

  bool insertable(std::size_t i) {
    for (TaskId s : cands_[i])
      if (sched_of(s).can_insert(s)) return true;
    return false;
  }

  int bound(std::size_t from) {
    int n = 0;
    for (std::size_t j = from; j < order_.size(); ++j) n += insertable(j) ? 1 : 0;
    return n;
  }

  void dfs(std::size_t i, int satisfied) {
    if (aborted_ || best_ == upper_bound()) return;
    ++nodes_;
    if (nodes_ > limits_.node_budget ||
        ((nodes_ & 1023) == 0 && seconds_since(start_) > limits_.time_limit_s)) {
      aborted_ = true;
      return;
    }
    if (satisfied > best_) {
      best_ = satisfied;
      best_witness_ = chosen_;
    }
    if (i == order_.size()) return;
    const int remaining = static_cast<int>(order_.size() - i);
    if (satisfied + remaining <= best_) return;
    if (satisfied + bound(i) <= best_) return;
    for (TaskId s : cands_[i]) {
      Schedule& sched = sched_of(s);
      if (!sched.can_insert(s)) continue;
      sched.insert(s);
      chosen_.push_back(s);
      dfs(i + 1, satisfied + 1);
      chosen_.pop_back();
      sched.erase(s);
      if (aborted_ || best_ == upper_bound()) return;
    }
    dfs(i + 1, satisfied);
  }

  const CollapsedInstance& c_;
  OracleLimits limits_;
  std::vector<Schedule> schedules_;
  std::vector<RequestId> order_;
  std::vector<std::vector<TaskId>> cands_;
  std::vector<TaskId> chosen_;
  std::vector<TaskId> best_witness_;
  int best_ = -1;
  long long nodes_ = 0;
  bool aborted_ = false;
  Clock::time_point start_;
};

}  // namespace

OracleResult branch_and_bound(const CollapsedInstance& c, const OracleLimits& limits,
                              std::span<const std::vector<TaskId>> incumbents) {
  const auto t0 = Clock::now();
  BranchAndBound bb(c, limits);
  bb.seed(0, {});
  for (const auto& w : incumbents) bb.seed(evaluate_witness(c, w), w);
  bb.run();
  OracleResult out;
  out.method = "bnb";
  out.value = bb.best();
  out.proven = !bb.aborted();
  out.nodes = bb.nodes();
  out.upper_bound = bb.upper_bound();
  out.witness = bb.witness();
  std::sort(out.witness.begin(), out.witness.end());
  out.seconds = seconds_since(t0);
  evaluate_witness(c, out.witness);
  return out;
}

OracleResult swo(const CollapsedInstance& c, const SwoOptions& options,
                 std::span<const std::vector<TaskId>> warm_starts) {
  if (options.rounds < 1) throw StructuralError("SWO needs at least one round");
  const auto t0 = Clock::now();
  const DcospInstance& d = *c.dcosp;
  OracleResult out;
  out.method = "swo";
  out.upper_bound = collapsed_upper_bound(c);
  for (const auto& w : warm_starts) {
    const int v = evaluate_witness(c, w);
    if (v > out.value || out.witness.empty()) {
      out.value = v;
      out.witness = w;
    }
  }

  // Initial priority: earliest candidate start, random tie-breaks.
  Rng rng = make_rng(options.seed);
  std::vector<RequestId> seq = c.requests;
  shuffle(std::span(seq), rng);
  auto earliest = [&](RequestId r) {
    const auto& v = c.tasks_by_request[static_cast<std::size_t>(r)];
    return v.empty() ? d.horizon.end + 1.0 : d.task(v.front()).interval.start;
  };
  std::stable_sort(seq.begin(), seq.end(),
                   [&](RequestId a, RequestId b) { return earliest(a) < earliest(b); });
  const long long jump =
      static_cast<long long>(std::ceil(static_cast<double>(seq.size()) / 10.0));

  for (int round = 0; round < options.rounds && out.value < out.upper_bound; ++round) {
    ++out.rounds;
    auto schedules = empty_schedules(c);
    std::vector<TaskId> chosen;
    std::vector<char> satisfied(seq.size(), 0);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      for (TaskId s : c.tasks_by_request[static_cast<std::size_t>(seq[i])]) {
        Schedule& sched = schedules[static_cast<std::size_t>(d.task(s).agent)];
        if (sched.can_insert(s)) {
          sched.insert(s);
          chosen.push_back(s);
          satisfied[i] = 1;
          break;
        }
      }
    }
    const int value = static_cast<int>(std::count(satisfied.begin(), satisfied.end(), 1));
    if (value > out.value || out.witness.empty()) {
      out.value = value;
      out.witness = chosen;
    }
    // Promote the squeaky wheels.
    std::vector<std::pair<long long, std::size_t>> keys;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const long long pos = static_cast<long long>(i);
      keys.push_back({satisfied[i] ? 2 * pos + 1 : 2 * std::max(0LL, pos - jump), i});
    }
    std::stable_sort(keys.begin(), keys.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<RequestId> next;
    for (const auto& [k, i] : keys) next.push_back(seq[i]);
    seq = std::move(next);
  }
  std::sort(out.witness.begin(), out.witness.end());
  out.proven = out.value == out.upper_bound;
  out.seconds = seconds_since(t0);
  evaluate_witness(c, out.witness);
  return out;
}

}  // namespace dcosp
