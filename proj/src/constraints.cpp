#include "dcosp/constraints.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace dcosp {

std::string to_string(Violation v) {
  switch (v) {
    case Violation::kNone: return "feasible";
    case Violation::kTaskOverlap: return "task-overlap";
    case Violation::kDownlinkOverlap: return "downlink-overlap";
    case Violation::kCapacityExceeded: return "capacity-exceeded";
  }
  return "unknown";
}

Verdict check_constraints(std::span<const Task> tasks, const SatelliteSpec& agent,
                          std::span<const Downlink> downlinks) {
  std::set<TaskId> ids;
  for (const Task& t : tasks) {
    if (t.agent != agent.id)
      throw StructuralError("task " + std::to_string(t.id) + " belongs to another agent");
    if (!ids.insert(t.id).second)
      throw StructuralError("duplicate task id " + std::to_string(t.id) + " in schedule");
  }

  std::vector<const Task*> order;
  for (const Task& t : tasks) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const Task* a, const Task* b) {
    return a->interval.start != b->interval.start ? a->interval.start < b->interval.start
                                                  : a->id < b->id;
  });

  Verdict v;
  const Task* reach = nullptr;  // task with the latest end so far
  for (const Task* t : order) {
    if (reach && reach->interval.overlaps(t->interval)) {
      v.kind = Violation::kTaskOverlap;
      v.first = reach->id;
      v.second = t->id;
      return v;
    }
    if (!reach || t->interval.end > reach->interval.end) reach = t;
  }

  std::vector<const Downlink*> dl;
  for (const Downlink& d : downlinks) dl.push_back(&d);
  std::sort(dl.begin(), dl.end(), [](const Downlink* a, const Downlink* b) {
    return a->interval.start < b->interval.start;
  });

  for (const Task* t : order)
    for (const Downlink* d : dl)
      if (d->interval.overlaps(t->interval)) {
        v.kind = Violation::kDownlinkOverlap;
        v.first = t->id;
        v.downlink = d->id;
        return v;
      }

  // Data gathered by a task is dumped at the first downlink starting after
  // the task ends.
  std::vector<Bytes> load(dl.size() + 1, 0);
  for (const Task* t : order) {
    std::size_t b = 0;
    while (b < dl.size() && dl[b]->interval.start < t->interval.end) ++b;
    load[b] += t->volume;
  }
  for (std::size_t b = 0; b < load.size(); ++b) {
    const Bytes limit =
        b < dl.size() ? std::min(agent.memory_capacity, dl[b]->capacity) : agent.memory_capacity;
    if (load[b] > limit) {
      v.kind = Violation::kCapacityExceeded;
      v.downlink = b < dl.size() ? dl[b]->id : -1;
      v.load = load[b];
      v.limit = limit;
      return v;
    }
  }
  return v;
}

Verdict check_schedule(const DcospInstance& dcosp, std::span<const TaskId> task_ids,
                       AgentId agent) {
  std::vector<Task> ts;
  ts.reserve(task_ids.size());
  for (TaskId id : task_ids) ts.push_back(dcosp.task(id));
  std::vector<Downlink> ds;
  for (DownlinkId id : dcosp.downlinks_of_agent(agent))
    ds.push_back(dcosp.downlinks[static_cast<std::size_t>(id)]);
  return check_constraints(ts, dcosp.agents.at(static_cast<std::size_t>(agent)), ds);
}

AgentModel::AgentModel(const DcospInstance& dcosp, AgentId agent) : agent_(agent) {
  const SatelliteSpec& spec = dcosp.agents.at(static_cast<std::size_t>(agent));
  for (DownlinkId id : dcosp.downlinks_of_agent(agent)) {
    const Downlink& d = dcosp.downlinks[static_cast<std::size_t>(id)];
    downlinks_.push_back(d.interval);
    limits_.push_back(std::min(spec.memory_capacity, d.capacity));
  }
  limits_.push_back(spec.memory_capacity);
}

std::size_t AgentModel::bucket_of(const Task& t) const {
  auto it = std::lower_bound(downlinks_.begin(), downlinks_.end(), t.interval.end,
                             [](const Interval& d, Seconds end) { return d.start < end; });
  return static_cast<std::size_t>(it - downlinks_.begin());
}

bool AgentModel::hits_downlink(const Task& t) const {
  // Downlinks are disjoint and sorted, so only the last one starting before
  // the task ends can overlap it.
  const std::size_t b = bucket_of(t);
  return b > 0 && downlinks_[b - 1].overlaps(t.interval);
}

Schedule::Schedule(const DcospInstance& dcosp, const AgentModel& model)
    : dcosp_(&dcosp), model_(&model), load_(model.bucket_count(), 0) {}

std::vector<TaskId>::const_iterator Schedule::lower(Seconds start) const {
  return std::lower_bound(tasks_.begin(), tasks_.end(), start, [this](TaskId id, Seconds s) {
    return dcosp_->task(id).interval.start < s;
  });
}

std::optional<TaskId> Schedule::task_for(RequestId r) const {
  auto it = by_request_.find(r);
  if (it == by_request_.end()) return std::nullopt;
  return it->second;
}

bool Schedule::contains(TaskId id) const {
  auto it = by_request_.find(dcosp_->task(id).request);
  return it != by_request_.end() && it->second == id;
}

bool Schedule::can_insert(TaskId id) const {
  const Task& t = dcosp_->task(id);
  assert(t.agent == model_->agent());
  if (has_request(t.request) || model_->hits_downlink(t)) return false;
  auto it = lower(t.interval.start);
  if (it != tasks_.end() && dcosp_->task(*it).interval.overlaps(t.interval)) return false;
  if (it != tasks_.begin() && dcosp_->task(*std::prev(it)).interval.overlaps(t.interval))
    return false;
  const std::size_t b = model_->bucket_of(t);
  return load_[b] + t.volume <= model_->bucket_limit(b);
}

void Schedule::insert(TaskId id) {
  assert(can_insert(id));
  const Task& t = dcosp_->task(id);
  tasks_.insert(tasks_.begin() + (lower(t.interval.start) - tasks_.begin()), id);
  load_[model_->bucket_of(t)] += t.volume;
  by_request_.emplace(t.request, id);
}

void Schedule::erase(TaskId id) {
  const Task& t = dcosp_->task(id);
  auto it = std::find(tasks_.begin(), tasks_.end(), id);
  if (it == tasks_.end()) return;
  tasks_.erase(it);
  load_[model_->bucket_of(t)] -= t.volume;
  by_request_.erase(t.request);
}

void Schedule::clear() {
  tasks_.clear();
  std::fill(load_.begin(), load_.end(), 0);
  by_request_.clear();
}

}  // namespace dcosp
