#include "dcosp/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace dcosp {

double Vec3::norm() const { return std::sqrt(dot(*this)); }

double OrbitalPlane::mean_motion() const {
  const double r = radius_km();
  return std::sqrt(kEarthMuKm3s2 / (r * r * r));
}

double OrbitalPlane::period() const { return 2.0 * kPi / mean_motion(); }

void OrbitalPlane::validate() const {
  if (!(inclination_deg >= 0.0 && inclination_deg <= 180.0))
    throw StructuralError("orbital plane inclination must lie in [0, 180] deg");
  if (!(altitude_km > 0.0))
    throw StructuralError("orbital plane altitude must be positive");
  if (satellite_count < 1)
    throw StructuralError("orbital plane needs at least one satellite");
}

void GroundStation::validate() const {
  if (std::abs(latitude_deg) > 90.0)
    throw StructuralError("ground station '" + name + "' latitude out of range");
  if (!(downlink_rate > 0.0))
    throw StructuralError("ground station '" + name + "' downlink rate must be positive");
}

Vec3 propagate_inertial(const OrbitalPlane& plane, int sat_index, Seconds t) {
  const double r = plane.radius_km();
  const double u0 = deg2rad(plane.phase_offset_deg) +
                    2.0 * kPi * static_cast<double>(sat_index) /
                        static_cast<double>(plane.satellite_count);
  const double u = u0 + plane.mean_motion() * t;
  const double inc = deg2rad(plane.inclination_deg);
  const double raan = deg2rad(plane.raan_deg);
  const double cu = std::cos(u), su = std::sin(u);
  const double co = std::cos(raan), so = std::sin(raan);
  const double ci = std::cos(inc), si = std::sin(inc);
  return {r * (co * cu - so * su * ci), r * (so * cu + co * su * ci), r * (su * si)};
}

Vec3 propagate(const OrbitalPlane& plane, int sat_index, Seconds t,
               double earth_rotation0) {
  const Vec3 p = propagate_inertial(plane, sat_index, t);
  const double theta = earth_rotation0 + kEarthRotationRadPerSec * t;
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * p.x + s * p.y, -s * p.x + c * p.y, p.z};
}

Vec3 ground_point(double latitude_deg, double longitude_deg) {
  const double lat = deg2rad(latitude_deg), lon = deg2rad(longitude_deg);
  return {kEarthRadiusKm * std::cos(lat) * std::cos(lon),
          kEarthRadiusKm * std::cos(lat) * std::sin(lon),
          kEarthRadiusKm * std::sin(lat)};
}

Geodetic to_geodetic(const Vec3& p) {
  const double r = p.norm();
  return {rad2deg(std::asin(p.z / r)), rad2deg(std::atan2(p.y, p.x)),
          r - kEarthRadiusKm};
}

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

bool sees_target(const Vec3& sat, const Vec3& ground, double max_off_nadir_deg) {
  return elevation_deg(sat, ground) > 0.0 &&
         off_nadir_deg(sat, ground) <= max_off_nadir_deg;
}

Seconds bisect(const std::function<bool(Seconds)>& pred, Seconds lo, Seconds hi,
               bool lo_value, Seconds tol) {
  // Invariant: pred(lo) == lo_value, pred(hi) != lo_value.
  while (hi - lo > tol) {
    const Seconds mid = 0.5 * (lo + hi);
    if (pred(mid) == lo_value)
      lo = mid;
    else
      hi = mid;
  }
  // Rising edges resolve to the first sample known true, falling edges to
  // the last sample known true.
  return lo_value ? lo : hi;
}

std::vector<Seconds> sample_grid(Interval horizon, Seconds step) {
  std::vector<Seconds> ts;
  const auto n = static_cast<std::size_t>(std::floor(horizon.duration() / step));
  ts.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k)
    ts.push_back(horizon.start + static_cast<double>(k) * step);
  if (ts.back() < horizon.end) ts.push_back(horizon.end);
  return ts;
}

// Shared scan: `coarse(k)` gives the predicate on grid sample k, `pred`
// evaluates it anywhere for refinement.
template <typename Coarse>
std::vector<Interval> scan(const std::vector<Seconds>& ts, Coarse&& coarse,
                           const std::function<bool(Seconds)>& pred, Seconds tol) {
  std::vector<Interval> out;
  if (ts.empty()) return out;
  bool prev = coarse(0);
  Seconds open = ts[0];
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const bool cur = coarse(k);
    if (cur == prev) continue;
    const Seconds edge = bisect(pred, ts[k - 1], ts[k], prev, tol);
    if (cur) {
      open = edge;
    } else if (edge > open) {
      out.push_back({open, edge});
    }
    prev = cur;
  }
  if (prev && ts.back() > open) out.push_back({open, ts.back()});
  return out;
}

}  // namespace

double off_nadir_deg(const Vec3& sat, const Vec3& ground) {
  return rad2deg(angle_between(sat * -1.0, ground - sat));
}

double elevation_deg(const Vec3& sat, const Vec3& ground) {
  return 90.0 - rad2deg(angle_between(ground, sat - ground));
}

std::vector<Interval> find_windows(const std::function<bool(Seconds)>& pred,
                                   Interval horizon, Seconds step, Seconds tolerance) {
  if (!(step > 0.0)) throw StructuralError("window scan step must be positive");
  const auto ts = sample_grid(horizon, step);
  return scan(ts, [&](std::size_t k) { return pred(ts[k]); }, pred, tolerance);
}

std::vector<Interval> access_windows(const OrbitalPlane& plane, const SatelliteSpec& sat,
                                     const Target& target, Interval horizon,
                                     Seconds step, double earth_rotation0) {
  const Vec3 ground = ground_point(target.latitude_deg, target.longitude_deg);
  auto pred = [&](Seconds t) {
    return sees_target(propagate(plane, sat.index_in_plane, t, earth_rotation0), ground,
                       sat.max_off_nadir_deg);
  };
  return find_windows(pred, horizon, step);
}

Bytes downlink_capacity(Seconds duration, double rate) {
  return static_cast<Bytes>(std::floor(duration * rate));
}

std::vector<DownlinkWindow> downlink_windows(const OrbitalPlane& plane,
                                             const SatelliteSpec& sat,
                                             const GroundStation& station,
                                             Interval horizon, Seconds step,
                                             double earth_rotation0) {
  const Vec3 ground = ground_point(station.latitude_deg, station.longitude_deg);
  auto pred = [&](Seconds t) {
    return elevation_deg(propagate(plane, sat.index_in_plane, t, earth_rotation0),
                         ground) > station.min_elevation_deg;
  };
  std::vector<DownlinkWindow> out;
  for (const Interval& w : find_windows(pred, horizon, step))
    out.push_back({w, downlink_capacity(w.duration(), station.downlink_rate)});
  return out;
}

TrackCache::TrackCache(std::span<const OrbitalPlane> planes,
                       std::span<const SatelliteSpec> sats, Interval horizon,
                       Seconds step, double earth_rotation0)
    : planes_(planes.begin(), planes.end()),
      sats_(sats.begin(), sats.end()),
      horizon_(horizon),
      step_(step),
      rot0_(earth_rotation0),
      times_(sample_grid(horizon, step)) {
  positions_.resize(sats_.size() * times_.size());
  for (std::size_t s = 0; s < sats_.size(); ++s) {
    const OrbitalPlane& plane = planes_.at(static_cast<std::size_t>(sats_[s].plane));
    for (std::size_t k = 0; k < times_.size(); ++k)
      positions_[s * times_.size() + k] =
          propagate(plane, sats_[s].index_in_plane, times_[k], rot0_);
  }
}

std::vector<Interval> TrackCache::access_windows(std::size_t sat,
                                                 const Target& target) const {
  const SatelliteSpec& spec = sats_[sat];
  const OrbitalPlane& plane = planes_[static_cast<std::size_t>(spec.plane)];
  const Vec3 ground = ground_point(target.latitude_deg, target.longitude_deg);

  // The target can only be seen while the sub-satellite point is inside the
  // coverage cap; the dot-product screen rejects most samples cheaply.
  const double r = plane.radius_km();
  const double eta = deg2rad(spec.max_off_nadir_deg);
  const double sin_eps = std::min(1.0, r / kEarthRadiusKm * std::sin(eta));
  const double cap = kPi / 2.0 - eta - std::acos(sin_eps);
  const double horizon_cap = std::acos(kEarthRadiusKm / r);
  const double lambda = std::min(cap > 0 ? cap : horizon_cap, horizon_cap);
  const double cos_screen = std::cos(lambda + 0.05);
  const Vec3 gu = ground * (1.0 / kEarthRadiusKm);

  const Vec3* base = &positions_[sat * times_.size()];

  auto pred = [&](Seconds t) {
    return sees_target(propagate(plane, spec.index_in_plane, t, rot0_), ground,
                       spec.max_off_nadir_deg);
  };
  return scan(
      times_,
      [&](std::size_t k) {
        return gu.dot(base[k]) >= cos_screen * r &&
               sees_target(base[k], ground, spec.max_off_nadir_deg);
      },
      pred, 0.5);
}

}  // namespace dcosp
