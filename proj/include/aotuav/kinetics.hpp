#pragma once

#include "aotuav/topology.hpp"

namespace aot {

/// Rotary-wing propulsion constants and the slot length. Defaults describe a DJI Mavic 3 class
/// airframe flying 300 s slots.
struct FlightParams {
  double blade_profile_power = 79.86;  // W
  double induced_power = 88.63;        // W
  double tip_speed = 120.0;            // m/s
  double hover_induced_velocity = 4.03;  // m/s
  double fuselage_drag_ratio = 0.6;
  double air_density = 1.225;  // kg/m^3
  double rotor_solidity = 0.05;
  double rotor_area = 0.503;  // m^2
  double v_max = 21.0;        // m/s
  double slot_seconds = 300.0;
  double altitude = 100.0;  // m, informational only

  friend bool operator==(const FlightParams&, const FlightParams&) = default;
};

/// Throws ConfigError unless every field is strictly positive and v_max does not exceed the tip speed.
void validate(const FlightParams& params);

double travel_distance(const Coordinate& a, const Coordinate& b);

/// Constant speed that covers `distance` in exactly one slot. Throws ConfigError above v_max.
double flight_speed(double distance, const FlightParams& params);

/// Energy per meter (J/m) at cruise speed v > 0: blade profile, induced and parasite terms.
double power_per_meter(double v, const FlightParams& params);

/// Energy (J) to fly from a to b within one slot; zero when a == b (the UAV stays landed).
double travel_energy(const Coordinate& a, const Coordinate& b, const FlightParams& params);

}  // namespace aot
