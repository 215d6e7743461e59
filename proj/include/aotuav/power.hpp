#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "aotuav/rng.hpp"

namespace aot {

constexpr double kJoulesPerWh = 3600.0;

struct UavBattery {
  double level = 0.0;     // J
  double capacity = 0.0;  // J
};

struct StationBattery {
  double level = 0.0;     // J
  double capacity = 0.0;  // J
};

/// Four-state weather chain driving the charging station's solar panel. Irradiance in each
/// state is Normal(mu, sigma) in W/m^2, truncated at zero.
struct SolarModel {
  static constexpr std::size_t kStates = 4;

  Eigen::Matrix4d transition;  // row-stochastic
  std::array<double, kStates> mu{800.0, 400.0, 150.0, 25.0};
  std::array<double, kStates> sigma{80.0, 60.0, 40.0, 15.0};
  double panel_area = 10.0;   // m^2
  double efficiency = 0.15;
  double slot_seconds = 300.0;

  SolarModel();

  /// Sticky chain: `stay` on the diagonal, the remainder spread evenly over the other states.
  static Eigen::Matrix4d sticky_transition(double stay);
};

void validate(const SolarModel& model);

struct SolarStep {
  std::size_t next_state = 0;
  double harvested = 0.0;  // J
};

/// Advances the weather chain one slot and draws the energy harvested during that slot
/// (panel_area * efficiency * slot_seconds * irradiance in the new state).
SolarStep solar_step(const SolarModel& model, std::size_t current_state, Rng& rng);

/// Station reserve after one slot: the UAV draws `charge_given` from the pre-slot reserve, then the
/// harvest arrives, then the level is clamped at capacity.
StationBattery station_update(const StationBattery& station, bool at_base, double charge_given, double harvested);

/// Energy the UAV absorbs during one recharge slot: everything it has room for, bounded by the reserve.
double charge_amount(double uav_level_after_travel, double uav_capacity, double station_level);

UavBattery uav_battery_update(const UavBattery& battery, double travel, double charge, bool at_base);

}  // namespace aot
