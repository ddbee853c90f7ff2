#pragma once

// Idealized two-body circular orbits over a spherical, rotating Earth.
//
// Frames:
//  - inertial: Earth-centred, z along the rotation axis, x fixed in space.
//  - ECEF: the inertial frame rotated by the Earth rotation angle
//    theta(t) = theta0 + omega_earth * t.
// All functions are pure; identical inputs give bit-identical outputs.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dcosp/types.hpp"

namespace dcosp {

inline constexpr double kEarthRadiusKm = 6378.137;
inline constexpr double kEarthMuKm3s2 = 398600.4418;
inline constexpr double kEarthRotationRadPerSec = 7.2921159e-5;
inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct OrbitalPlane {
  double inclination_deg = 0.0;
  double altitude_km = 500.0;
  double raan_deg = 0.0;
  int satellite_count = 1;
  // Argument of latitude of satellite 0 at t = 0; the rest follow at
  // 360/satellite_count spacing.
  double phase_offset_deg = 0.0;

  double radius_km() const { return kEarthRadiusKm + altitude_km; }
  double mean_motion() const;  // rad/s
  double period() const;       // s
  void validate() const;
};

struct SatelliteSpec {
  AgentId id = 0;
  int plane = 0;
  int index_in_plane = 0;
  double max_off_nadir_deg = 45.0;
  Bytes memory_capacity = 125 * kGigabyte;
};

struct GroundStation {
  std::string name;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double min_elevation_deg = 5.0;
  double downlink_rate = 62.5e6;  // bytes per second
  void validate() const;
};

struct Target {
  TargetId id = 0;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
};

struct Geodetic {
  double latitude_deg;
  double longitude_deg;
  double altitude_km;
};

struct DownlinkWindow {
  Interval interval;
  Bytes capacity = 0;
};

// Position in the inertial frame.
Vec3 propagate_inertial(const OrbitalPlane& plane, int sat_index, Seconds t);
// Position in the Earth-fixed frame; earth_rotation0 is theta(0) in radians.
Vec3 propagate(const OrbitalPlane& plane, int sat_index, Seconds t,
               double earth_rotation0 = 0.0);

Vec3 ground_point(double latitude_deg, double longitude_deg);
Geodetic to_geodetic(const Vec3& ecef);

// Angle between the satellite nadir and the line of sight to the ground point.
double off_nadir_deg(const Vec3& sat, const Vec3& ground);
// Elevation of the satellite above the local horizon of the ground point.
double elevation_deg(const Vec3& sat, const Vec3& ground);

// Maximal intervals of `horizon` on which `pred` holds. The predicate is
// sampled every `step` seconds and each transition is refined by bisection
// until it is bracketed within `tolerance` seconds.
std::vector<Interval> find_windows(const std::function<bool(Seconds)>& pred,
                                   Interval horizon, Seconds step,
                                   Seconds tolerance = 0.5);

inline constexpr Seconds kDefaultScanStep = 10.0;

std::vector<Interval> access_windows(const OrbitalPlane& plane,
                                     const SatelliteSpec& sat,
                                     const Target& target, Interval horizon,
                                     Seconds step = kDefaultScanStep,
                                     double earth_rotation0 = 0.0);

std::vector<DownlinkWindow> downlink_windows(const OrbitalPlane& plane,
                                             const SatelliteSpec& sat,
                                             const GroundStation& station,
                                             Interval horizon,
                                             Seconds step = kDefaultScanStep,
                                             double earth_rotation0 = 0.0);

Bytes downlink_capacity(Seconds duration, double rate);

// Precomputed Earth-fixed satellite tracks on a regular time grid. Used to
// screen many targets against many satellites quickly before refinement.
class TrackCache {
 public:
  TrackCache(std::span<const OrbitalPlane> planes,
             std::span<const SatelliteSpec> sats, Interval horizon,
             Seconds step, double earth_rotation0);

  std::size_t sample_count() const { return times_.size(); }
  Seconds time(std::size_t i) const { return times_[i]; }
  const Vec3& position(std::size_t sat, std::size_t i) const {
    return positions_[sat * times_.size() + i];
  }

  std::vector<Interval> access_windows(std::size_t sat, const Target& target) const;

 private:
  std::vector<OrbitalPlane> planes_;
  std::vector<SatelliteSpec> sats_;
  Interval horizon_;
  Seconds step_;
  double rot0_;
  std::vector<Seconds> times_;
  std::vector<Vec3> positions_;
};

}  // namespace dcosp
