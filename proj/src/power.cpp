#include "aotuav/power.hpp"

#include <algorithm>
#include <cmath>

#include "aotuav/errors.hpp"

namespace aot {

SolarModel::SolarModel() : transition(sticky_transition(0.7)) {}

Eigen::Matrix4d SolarModel::sticky_transition(double stay) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Constant((1.0 - stay) / 3.0);
  m.diagonal().setConstant(stay);
  return m;
}

void validate(const SolarModel& model) {
  for (Eigen::Index r = 0; r < 4; ++r) {
    if ((model.transition.row(r).array() < 0.0).any()) throw ConfigError("solar transition has a negative entry");
    if (std::abs(model.transition.row(r).sum() - 1.0) > 1e-9) throw ConfigError("solar transition rows must sum to 1");
  }
  for (std::size_t j = 0; j < SolarModel::kStates; ++j) {
    if (!std::isfinite(model.mu[j]) || !(model.sigma[j] >= 0.0)) throw ConfigError("solar mu/sigma invalid");
  }
  if (!(model.efficiency > 0.0 && model.efficiency <= 1.0)) throw ConfigError("solar efficiency must be in (0,1]");
  if (!(model.panel_area > 0.0)) throw ConfigError("solar panel area must be positive");
  if (!(model.slot_seconds > 0.0)) throw ConfigError("slot length must be positive");
}

namespace {

double truncated_normal(double mu, double sigma, Rng& rng) {
  if (sigma == 0.0) return std::max(0.0, mu);
  std::normal_distribution<double> normal(mu, sigma);
  for (int i = 0; i < 64; ++i) {
    const double x = normal(rng);
    if (x >= 0.0) return x;
  }
  return 0.0;
}

}  // namespace

SolarStep solar_step(const SolarModel& model, std::size_t current_state, Rng& rng) {
  if (current_state >= SolarModel::kStates) throw DomainError("solar_step: state index out of range");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  std::size_t next = SolarModel::kStates - 1;
  double acc = 0.0;
  for (std::size_t j = 0; j < SolarModel::kStates; ++j) {
    acc += model.transition(static_cast<Eigen::Index>(current_state), static_cast<Eigen::Index>(j));
    if (u < acc) {
      next = j;
      break;
    }
  }
  // Skip zero-probability tail states that rounding could otherwise select.
  while (model.transition(static_cast<Eigen::Index>(current_state), static_cast<Eigen::Index>(next)) == 0.0 && next > 0) {
    --next;
  }
  const double irradiance = truncated_normal(model.mu[next], model.sigma[next], rng);
  return {next, model.panel_area * model.efficiency * model.slot_seconds * irradiance};
}

StationBattery station_update(const StationBattery& station, bool at_base, double charge_given, double harvested) {
  if (charge_given < 0.0 || harvested < 0.0) throw DomainError("station_update: negative energy");
  if (!at_base && charge_given != 0.0) throw ContractViolation("station_update: charging while the UAV is away");
  if (charge_given > station.level) throw EnergyViolation("station_update: charge exceeds the station reserve");
  StationBattery next = station;
  next.level = std::min(station.capacity, station.level - (at_base ? charge_given : 0.0) + harvested);
  return next;
}

double charge_amount(double uav_level_after_travel, double uav_capacity, double station_level) {
  return std::max(0.0, std::min(uav_capacity - uav_level_after_travel, station_level));
}

UavBattery uav_battery_update(const UavBattery& battery, double travel, double charge, bool at_base) {
  if (travel < 0.0 || charge < 0.0) throw DomainError("uav_battery_update: negative energy");
  if (travel > battery.level) throw EnergyViolation("uav_battery_update: travel energy exceeds battery level");
  if (!at_base && charge != 0.0) throw ContractViolation("uav_battery_update: charging away from base");
  UavBattery next = battery;
  next.level = at_base ? std::min(battery.capacity, battery.level - travel + charge) : battery.level - travel;
  return next;
}

}  // namespace aot
