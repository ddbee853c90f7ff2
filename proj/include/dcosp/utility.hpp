#pragma once

#include <span>
#include <vector>

#include "dcosp/problem.hpp"

namespace dcosp {

// Number of requests in `requests` with at least one scheduled task.
// `assignment[s]` is x(s) for every task id s of `tasks`.
int static_utility(std::span<const char> assignment, std::span<const Task> tasks,
                   std::span<const RequestId> requests);

// One snapshot of the global assignment per instance delta_t, as the task
// ids that were scheduled when delta_t became live.
using ScheduleTrace = std::vector<std::vector<TaskId>>;

// executed(s) = 1 iff s is in the snapshot of some delta_t whose static
// window overlaps h(s). Counts ever-active requests with an executed task.
// Throws StructuralError when the trace length differs from the instance count.
int dynamic_utility(const ScheduleTrace& trace, const DcospInstance& dcosp);

// The executed task ids of a trace, ascending.
std::vector<TaskId> executed_tasks(const ScheduleTrace& trace, const DcospInstance& dcosp);

}  // namespace dcosp
