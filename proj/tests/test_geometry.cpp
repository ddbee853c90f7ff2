#include <gtest/gtest.h>

#include <cmath>

#include "dcosp/geometry.hpp"

using namespace dcosp;

namespace {

// Off-nadir and elevation straight from the vectors, for the dense oracles.
double angle_deg(const Vec3& a, const Vec3& b) {
  const double c = a.dot(b) / (std::sqrt(a.dot(a)) * std::sqrt(b.dot(b)));
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / kPi;
}

bool dense_sees(const Vec3& sat, const Vec3& g, double max_off_nadir) {
  const double elev = 90.0 - angle_deg(g, sat - g);
  return elev > 0.0 && angle_deg(sat * -1.0, g - sat) <= max_off_nadir;
}

// Maximal runs of true samples at 1 s resolution.
std::vector<Interval> dense_windows(const std::function<bool(Seconds)>& pred, Interval h) {
  std::vector<Interval> out;
  bool in = false;
  Seconds start = 0;
  for (Seconds t = h.start; t <= h.end; t += 1.0) {
    const bool v = pred(t);
    if (v && !in) start = t;
    if (!v && in) out.push_back({start, t - 1.0});
    in = v;
  }
  if (in) out.push_back({start, h.end});
  return out;
}

OrbitalPlane polar() {
  OrbitalPlane p;
  p.inclination_deg = 90.0;
  p.altitude_km = 500.0;
  p.satellite_count = 1;
  return p;
}

}  // namespace

TEST(Geometry, EquatorialPlaneAtEpochSitsOnReferenceMeridian) {
  OrbitalPlane p;
  p.inclination_deg = 0.0;
  p.altitude_km = 500.0;
  const Vec3 v = propagate(p, 0, 0.0);
  const Geodetic g = to_geodetic(v);
  EXPECT_NEAR(g.latitude_deg, 0.0, 1e-9);
  EXPECT_NEAR(g.longitude_deg, 0.0, 1e-9);
  EXPECT_NEAR(g.altitude_km, 500.0, 1e-6);
}

TEST(Geometry, InertialPositionIsPeriodic) {
  OrbitalPlane p;
  p.inclination_deg = 53.0;
  p.altitude_km = 550.0;
  p.raan_deg = 40.0;
  p.satellite_count = 7;
  for (int s = 0; s < 7; ++s)
    for (Seconds t : {0.0, 1234.5, 40000.0}) {
      const Vec3 a = propagate_inertial(p, s, t);
      const Vec3 b = propagate_inertial(p, s, t + p.period());
      EXPECT_NEAR((a - b).norm(), 0.0, 1e-6);
    }
}

TEST(Geometry, PolarSatelliteCrossesEquatorTwicePerPeriod) {
  OrbitalPlane p = polar();
  p.phase_offset_deg = 17.0;  // keep t = 0 off the equator
  const Seconds period = p.period();
  int crossings = 0;
  double prev = to_geodetic(propagate(p, 0, 0.0)).latitude_deg;
  for (Seconds t = 1.0; t <= period; t += 1.0) {
    const double lat = to_geodetic(propagate(p, 0, t)).latitude_deg;
    if ((prev < 0) != (lat < 0)) ++crossings;
    prev = lat;
  }
  EXPECT_EQ(crossings, 2);
}

TEST(Geometry, PositionsAreContinuous) {
  OrbitalPlane p = polar();
  const double speed = p.radius_km() * p.mean_motion() +
                       kEarthRotationRadPerSec * p.radius_km();  // km/s upper bound
  for (Seconds t = 0; t < 6000; t += 137.0) {
    const Vec3 a = propagate(p, 0, t, 0.3);
    const Vec3 b = propagate(p, 0, t + 1e-3, 0.3);
    EXPECT_LE((a - b).norm(), speed * 1e-3 * 1.1);
  }
}

TEST(Geometry, PoleUnreachableFromEquatorialOrbit) {
  OrbitalPlane p;
  p.inclination_deg = 0.0;
  p.altitude_km = 500.0;
  SatelliteSpec sat;
  sat.max_off_nadir_deg = 45.0;
  const Target pole{0, 90.0, 0.0};
  EXPECT_TRUE(access_windows(p, sat, pole, {0, 86400}).empty());
}

TEST(Geometry, WiderConeNeverShrinksWindows) {
  const OrbitalPlane p = polar();
  SatelliteSpec narrow, wide;
  narrow.max_off_nadir_deg = 30.0;
  wide.max_off_nadir_deg = 45.0;
  int compared = 0;
  for (double lat : {-50.0, 0.0, 40.0, 70.0})
    for (double lon : {-120.0, 10.0, 100.0}) {
      const Target target{0, lat, lon};
      const auto a = access_windows(p, narrow, target, {0, 86400});
      const auto b = access_windows(p, wide, target, {0, 86400});
      for (const auto& w : a) {
        ++compared;
        bool covered = false;
        for (const auto& v : b)
          covered = covered || (v.start <= w.start + 1.0 && w.end <= v.end + 1.0);
        EXPECT_TRUE(covered) << lat << "," << lon << ": " << w.start << "-" << w.end;
      }
    }
  EXPECT_GT(compared, 0);
}

TEST(Geometry, AccessWindowsMatchDenseSampling) {
  const OrbitalPlane p = polar();
  SatelliteSpec sat;
  sat.max_off_nadir_deg = 45.0;
  const Target target{0, 45.0, 7.0};
  const Interval h{0, 86400};
  const double rot0 = 1.1;
  const auto got = access_windows(p, sat, target, h, kDefaultScanStep, rot0);
  const Vec3 g = ground_point(target.latitude_deg, target.longitude_deg);
  const auto want = dense_windows(
      [&](Seconds t) { return dense_sees(propagate(p, 0, t, rot0), g, 45.0); }, h);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i].start, want[i].start, 1.0);
    EXPECT_NEAR(got[i].end, want[i].end, 1.0);
    EXPECT_TRUE(h.contains(got[i]));
    if (i) {
      EXPECT_LT(got[i - 1].end, got[i].start);
    }
  }
}

TEST(Geometry, DownlinkWindowsMatchDenseSampling) {
  const OrbitalPlane p = polar();
  SatelliteSpec sat;
  GroundStation st{"Fairbanks", 64.86, -147.85, 5.0, 62.5e6};
  const Interval h{0, 86400};
  const auto got = downlink_windows(p, sat, st, h);
  const Vec3 g = ground_point(st.latitude_deg, st.longitude_deg);
  const auto want = dense_windows(
      [&](Seconds t) { return 90.0 - angle_deg(g, propagate(p, 0, t) - g) > 5.0; }, h);
  ASSERT_EQ(got.size(), want.size());
  ASSERT_FALSE(got.empty());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i].interval.start, want[i].start, 1.0);
    EXPECT_NEAR(got[i].interval.end, want[i].end, 1.0);
    EXPECT_EQ(got[i].capacity,
              static_cast<Bytes>(std::floor(got[i].interval.duration() * 62.5e6)));
  }
}

TEST(Geometry, DownlinkCapacityArithmetic) {
  EXPECT_EQ(downlink_capacity(0.0, 62.5e6), 0);
  EXPECT_EQ(downlink_capacity(160.0, 62.5e6), 10'000 * kMegabyte);
}

TEST(Geometry, WindowsAreDeterministic) {
  const OrbitalPlane p = polar();
  SatelliteSpec sat;
  const Target target{0, 30.0, -20.0};
  const auto a = access_windows(p, sat, target, {0, 86400}, 10.0, 0.7);
  const auto b = access_windows(p, sat, target, {0, 86400}, 10.0, 0.7);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].start, b[i].start);
    EXPECT_EQ(a[i].end, b[i].end);
  }
}

TEST(Geometry, TrackCacheAgreesWithDirectScan) {
  const std::vector<OrbitalPlane> planes = {polar()};
  const std::vector<SatelliteSpec> sats = {SatelliteSpec{}};
  const Target target{0, 52.0, 4.0};
  TrackCache cache(planes, sats, {0, 86400}, 10.0, 0.4);
  const auto a = cache.access_windows(0, target);
  const auto b = access_windows(planes[0], sats[0], target, {0, 86400}, 10.0, 0.4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i].start, b[i].start, 1.0);
    EXPECT_NEAR(a[i].end, b[i].end, 1.0);
  }
}

TEST(Geometry, InvalidInputsThrow) {
  OrbitalPlane p;
  p.altitude_km = -10.0;
  EXPECT_THROW(p.validate(), StructuralError);
  GroundStation s;
  s.downlink_rate = 0.0;
  EXPECT_THROW(s.validate(), StructuralError);
  EXPECT_THROW(find_windows([](Seconds) { return true; }, {0, 10}, 0.0), StructuralError);
}
