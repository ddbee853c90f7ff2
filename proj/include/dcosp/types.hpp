#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dcosp {

// Time is measured in seconds since the start of the scheduling horizon.
using Seconds = double;
// Data volumes are whole bytes so capacity sums are exact.
using Bytes = std::int64_t;

using AgentId = std::int32_t;
using TargetId = std::int32_t;
using RequestId = std::int32_t;
using TaskId = std::int32_t;
using DownlinkId = std::int32_t;

inline constexpr Bytes kMegabyte = 1'000'000;
inline constexpr Bytes kGigabyte = 1'000'000'000;

// Closed time interval [start, end]. Two intervals overlap only when they
// share a stretch of positive length, so abutting intervals do not conflict.
struct Interval {
  Seconds start = 0.0;
  Seconds end = 0.0;

  constexpr Seconds duration() const { return end - start; }
  constexpr bool valid() const { return start <= end; }
  constexpr bool overlaps(const Interval& o) const {
    return start < o.end && o.start < end;
  }
  constexpr bool contains(Seconds t) const { return start <= t && t <= end; }
  constexpr bool contains(const Interval& o) const {
    return start <= o.start && o.end <= end;
  }
  constexpr Interval intersect(const Interval& o) const {
    Interval r{start > o.start ? start : o.start, end < o.end ? end : o.end};
    if (r.end < r.start) r.end = r.start;
    return r;
  }
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

// Raised when inputs are malformed (as opposed to merely infeasible).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the scenario generators when a configuration cannot be realised.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a solver hands back a schedule that breaks an invariant.
class SolverInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dcosp
