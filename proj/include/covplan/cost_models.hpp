#pragma once

#include <optional>

#include "covplan/geometry.hpp"

namespace covplan {

struct RampParams {
  double v_max = 3.0;  // m/s
  double a_max = 1.0;  // m/s^2
  // distance needed to reach v_max from rest and brake back to rest
  double accel_distance() const { return v_max * v_max / a_max; }
};

// Meteorological convention: from_deg is the compass bearing the wind blows FROM.
struct WindParams {
  double speed = 0.0;     // m/s
  double from_deg = 0.0;  // degrees, 0 = north, 90 = east
  Point blow_to() const;  // unit vector, world x/y frame (x east, y north)
};

enum class CostKind { length, ramp_time, directed_speed_time };

struct CostModel {
  CostKind kind = CostKind::length;
  RampParams service_ramp;
  RampParams deadhead_ramp;
  double service_speed = 1.0;   // m/s, directed_speed_time only
  double deadhead_speed = 1.0;  // m/s
  std::optional<WindParams> wind;

  static CostModel length();
  static CostModel ramp(RampParams service, RampParams deadhead);
  static CostModel wind_model(double service_speed, double deadhead_speed, WindParams wind);
};

// Travel time with bounded acceleration: sqrt(4d/a) below the ramp distance,
// v/a + d/v beyond it. Continuous at d = v^2/a.
double ramp_time(double d, const RampParams& p);

// Ground speed along travel_dir (unit vector) under the given wind.
// Throws WindTooStrong when nominal <= wind.speed.
double directed_speed(double nominal, const WindParams& wind, Point travel_dir);

enum class TravelMode { service, deadhead };

struct EdgeValues {
  double cost_fwd = 0, cost_rev = 0;
  double demand_fwd = 0, demand_rev = 0;
};

EdgeValues edge_cost_demand(const Segment& seg, TravelMode mode, const CostModel& model);

}  // namespace covplan
