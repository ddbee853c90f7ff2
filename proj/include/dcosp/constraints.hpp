#pragma once

// Per-agent constraint evaluation: no two tasks at once, no task during a
// downlink, and the data gathered before each downlink fits both the
// onboard memory and what the downlink can carry.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcosp/problem.hpp"

namespace dcosp {

enum class Violation { kNone, kTaskOverlap, kDownlinkOverlap, kCapacityExceeded };

std::string to_string(Violation v);

struct Verdict {
  Violation kind = Violation::kNone;
  TaskId first = -1;
  TaskId second = -1;
  DownlinkId downlink = -1;  // -1 with kCapacityExceeded: the post-final-downlink bucket
  Bytes load = 0;
  Bytes limit = 0;

  bool feasible() const { return kind == Violation::kNone; }
};

// Full evaluation of one agent's schedule from scratch. `tasks` may be in
// any order. Throws StructuralError for duplicate ids or foreign tasks.
Verdict check_constraints(std::span<const Task> tasks, const SatelliteSpec& agent,
                          std::span<const Downlink> downlinks);

// Precomputed constraint data for one agent: its downlinks in time order,
// the capacity limit of each downlink bucket, and for each of its tasks the
// bucket it drains into and whether it collides with a downlink.
class AgentModel {
 public:
  AgentModel() = default;
  AgentModel(const DcospInstance& dcosp, AgentId agent);

  AgentId agent() const { return agent_; }
  // Bucket b < downlink_count() drains at downlink b; the last bucket holds
  // data with no later downlink and is limited by memory alone.
  std::size_t bucket_count() const { return limits_.size(); }
  Bytes bucket_limit(std::size_t b) const { return limits_[b]; }
  std::size_t bucket_of(const Task& t) const;
  bool hits_downlink(const Task& t) const;

 private:
  AgentId agent_ = -1;
  std::vector<Interval> downlinks_;
  std::vector<Bytes> limits_;
};

// Mutable, always-feasible schedule for one agent with incremental checks.
// Holds non-owning pointers to the instance and agent model.
class Schedule {
 public:
  Schedule() = default;
  Schedule(const DcospInstance& dcosp, const AgentModel& model);

  AgentId agent() const { return model_->agent(); }
  // Task ids ascending by start time.
  const std::vector<TaskId>& tasks() const { return tasks_; }
  std::size_t size() const { return tasks_.size(); }
  bool empty() const { return tasks_.empty(); }

  bool has_request(RequestId r) const { return by_request_.contains(r); }
  std::optional<TaskId> task_for(RequestId r) const;
  bool contains(TaskId id) const;

  // True iff inserting `id` keeps every constraint satisfied and the
  // schedule holds no other task for the same request.
  bool can_insert(TaskId id) const;
  void insert(TaskId id);  // precondition: can_insert(id)
  void erase(TaskId id);
  void clear();

  const std::map<RequestId, TaskId>& by_request() const { return by_request_; }

 private:
  std::vector<TaskId>::const_iterator lower(Seconds start) const;

  const DcospInstance* dcosp_ = nullptr;
  const AgentModel* model_ = nullptr;
  std::vector<TaskId> tasks_;
  std::vector<Bytes> load_;
  std::map<RequestId, TaskId> by_request_;
};

// Convenience: full check of a Schedule through check_constraints.
Verdict check_schedule(const DcospInstance& dcosp, std::span<const TaskId> task_ids,
                       AgentId agent);

}  // namespace dcosp
