#include "dcosp/utility.hpp"

#include <algorithm>

namespace dcosp {

int static_utility(std::span<const char> assignment, std::span<const Task> tasks,
                   std::span<const RequestId> requests) {
  if (assignment.size() != tasks.size())
    throw StructuralError("assignment size does not match task count");
  RequestId max_id = -1;
  for (RequestId r : requests) max_id = std::max(max_id, r);
  std::vector<char> satisfied(static_cast<std::size_t>(max_id + 1), 0);
  for (const Task& t : tasks)
    if (assignment[static_cast<std::size_t>(t.id)] && t.request <= max_id)
      satisfied[static_cast<std::size_t>(t.request)] = 1;
  int n = 0;
  for (RequestId r : requests) n += satisfied[static_cast<std::size_t>(r)];
  return n;
}

std::vector<TaskId> executed_tasks(const ScheduleTrace& trace, const DcospInstance& dcosp) {
  if (trace.size() != dcosp.instance_count())
    throw StructuralError("trace has " + std::to_string(trace.size()) +
                          " snapshots for " + std::to_string(dcosp.instance_count()) +
                          " instances");
  std::vector<char> executed(dcosp.tasks.size(), 0);
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const Interval live = dcosp.static_window(t);
    for (TaskId s : trace[t])
      if (dcosp.task(s).interval.overlaps(live)) executed[static_cast<std::size_t>(s)] = 1;
  }
  std::vector<TaskId> out;
  for (std::size_t s = 0; s < executed.size(); ++s)
    if (executed[s]) out.push_back(static_cast<TaskId>(s));
  return out;
}

int dynamic_utility(const ScheduleTrace& trace, const DcospInstance& dcosp) {
  std::vector<char> satisfied(dcosp.requests.size(), 0);
  for (TaskId s : executed_tasks(trace, dcosp))
    satisfied[static_cast<std::size_t>(dcosp.task(s).request)] = 1;
  int n = 0;
  for (RequestId r : dcosp.ever_active()) n += satisfied[static_cast<std::size_t>(r)];
  return n;
}

}  // namespace dcosp
