#include "aotuav/kinetics.hpp"

#include <cmath>
#include <string>

#include "aotuav/errors.hpp"

namespace aot {

void validate(const FlightParams& p) {
  const double fields[] = {p.blade_profile_power, p.induced_power,  p.tip_speed,      p.hover_induced_velocity,
                           p.fuselage_drag_ratio, p.air_density,    p.rotor_solidity, p.rotor_area,
                           p.v_max,               p.slot_seconds};
  for (double f : fields) {
    if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("flight parameters must be finite and strictly positive");
  }
  if (p.v_max > p.tip_speed) throw ConfigError("v_max must not exceed the rotor tip speed");
}

double travel_distance(const Coordinate& a, const Coordinate& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double flight_speed(double distance, const FlightParams& params) {
  if (distance < 0.0) throw DomainError("flight_speed: negative distance");
  const double v = distance / params.slot_seconds;
  if (v > params.v_max) {
    throw ConfigError("flight_speed: " + std::to_string(distance) + " m in one slot needs " + std::to_string(v) +
                      " m/s, above v_max; the region is too large");
  }
  return v;
}

double power_per_meter(double v, const FlightParams& p) {
  if (!(v > 0.0)) throw DomainError("power_per_meter: speed must be positive");
  const double v0_sq = p.tip_speed * p.tip_speed;
  const double v1_sq = p.hover_induced_velocity * p.hover_induced_velocity;
  const double blade = p.blade_profile_power * (1.0 / v + 3.0 * v / v0_sq);
  const double induced =
      p.induced_power * std::sqrt(std::sqrt(std::pow(v, -4.0) + 1.0 / (4.0 * v1_sq * v1_sq)) - 1.0 / (2.0 * v1_sq));
  const double parasite = 0.5 * p.fuselage_drag_ratio * p.air_density * p.rotor_solidity * p.rotor_area * v * v;
  return blade + induced + parasite;
}

double travel_energy(const Coordinate& a, const Coordinate& b, const FlightParams& params) {
  const double d = travel_distance(a, b);
  if (d == 0.0) return 0.0;
  return power_per_meter(flight_speed(d, params), params) * d;
}

}  // namespace aot
