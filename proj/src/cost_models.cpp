#include "covplan/cost_models.hpp"

#include <cmath>
#include <numbers>

#include "covplan/errors.hpp"

namespace covplan {

Point WindParams::blow_to() const {
  const double bearing = (from_deg + 180.0) * std::numbers::pi / 180.0;
  return {std::sin(bearing), std::cos(bearing)};
}

CostModel CostModel::length() { return CostModel{}; }

CostModel CostModel::ramp(RampParams service, RampParams deadhead) {
  CostModel m;
  m.kind = CostKind::ramp_time;
  m.service_ramp = service;
  m.deadhead_ramp = deadhead;
  return m;
}

CostModel CostModel::wind_model(double service_speed, double deadhead_speed, WindParams wind) {
  CostModel m;
  m.kind = CostKind::directed_speed_time;
  m.service_speed = service_speed;
  m.deadhead_speed = deadhead_speed;
  m.wind = wind;
  return m;
}

double ramp_time(double d, const RampParams& p) {
  if (d < 0) throw InvalidParameter("ramp_time: negative distance");
  if (p.v_max <= 0 || p.a_max <= 0) throw InvalidParameter("ramp_time: non-positive ramp parameters");
  if (d < p.accel_distance()) return std::sqrt(4.0 * d / p.a_max);
  return p.v_max / p.a_max + d / p.v_max;
}

double directed_speed(double nominal, const WindParams& wind, Point travel_dir) {
  if (nominal <= wind.speed)
    throw WindTooStrong("nominal speed must exceed wind speed for all travel directions");
  return nominal + wind.speed * dot(wind.blow_to(), travel_dir);
}

EdgeValues edge_cost_demand(const Segment& seg, TravelMode mode, const CostModel& model) {
  const double len = seg.length();
  EdgeValues v;
  switch (model.kind) {
    case CostKind::length:
      v.cost_fwd = v.cost_rev = len;
      break;
    case CostKind::ramp_time: {
      const RampParams& p = mode == TravelMode::service ? model.service_ramp : model.deadhead_ramp;
      v.cost_fwd = v.cost_rev = ramp_time(len, p);
      break;
    }
    case CostKind::directed_speed_time: {
      const double nominal = mode == TravelMode::service ? model.service_speed : model.deadhead_speed;
      const WindParams wind = model.wind.value_or(WindParams{});
      const Point d = seg.dir();
      if (len <= 0) {
        v.cost_fwd = v.cost_rev = 0;
      } else {
        v.cost_fwd = len / directed_speed(nominal, wind, d);
        v.cost_rev = len / directed_speed(nominal, wind, {-d.x, -d.y});
      }
      break;
    }
  }
  v.demand_fwd = v.cost_fwd;
  v.demand_rev = v.cost_rev;
  return v;
}

}  // namespace covplan
