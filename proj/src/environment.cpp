#include "aotuav/environment.hpp"

#include <numeric>
#include <string>

#include "aotuav/errors.hpp"
#include "aotuav/kinetics.hpp"

namespace aot {

double average_aot(std::span<const std::int64_t> aot) {
  if (aot.empty()) throw DomainError("average_aot: no devices");
  const double sum = std::accumulate(aot.begin(), aot.end(), 0.0,
                                     [](double acc, std::int64_t v) { return acc + static_cast<double>(v); });
  return sum / static_cast<double>(aot.size());
}

DeviceGraph build_graph(const NetworkSetup& setup) {
  if (!setup.graph_file.empty()) return load_graph(setup.graph_file);
  DeviceGraph g = random_geometric_graph(setup.devices, setup.region, setup.radius, setup.link_capacity,
                                         setup.topology_seed);
  g.base = setup.base;
  return scale_to_throughput(std::move(g), setup.target_kbps);
}

Environment::Environment(const RunConfig& config) : config_(config) {
  validate(config_);
  graph_ = build_graph(config_.network);
  initialise();
}

Environment::Environment(const RunConfig& config, DeviceGraph graph) : config_(config), graph_(std::move(graph)) {
  validate(config_);
  initialise();
}

void Environment::initialise() {
  validate(graph_);
  devices_ = graph_.attestable();
  if (devices_.empty()) throw ConfigError("graph has no attestable devices");
  table_ = build_throughput_table(graph_);

  throughput_.resize(action_count());
  for (std::size_t i = 0; i < devices_.size(); ++i) throughput_[i] = table_.degraded.at(devices_[i]);
  throughput_[base_action()] = table_.full;

  const auto n = static_cast<Eigen::Index>(action_count());
  energy_.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      // flight_speed rejects any pair that cannot be covered in one slot.
      energy_(a, b) = travel_energy(position_of(static_cast<std::size_t>(a)), position_of(static_cast<std::size_t>(b)),
                                    config_.flight);
    }
  }

  const std::size_t base = base_action();
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (energy(base, i) + energy(i, base) > config_.uav_capacity) {
      throw ConfigError("device " + std::to_string(i) + " is out of round-trip range on a full battery");
    }
  }
}

Coordinate Environment::position_of(std::size_t position) const {
  if (position == base_action()) return graph_.base;
  return graph_.nodes.at(devices_.at(position));
}

EnvState Environment::reset(std::uint64_t seed) {
  rng_.seed(seed);
  EnvState s;
  s.aot.assign(devices_.size(), 1);
  if (config_.initial_aot == InitialAot::Random) {
    std::uniform_int_distribution<std::int64_t> age(1, static_cast<std::int64_t>(config_.aot_norm));
    for (auto& a : s.aot) a = age(rng_);
  }
  s.position = base_action();
  s.uav_level = config_.uav_capacity;
  s.station_level = config_.station_initial;
  s.solar_state = config_.solar_initial_state;
  s.slot = 0;
  return s;
}

ActionMask Environment::feasible_actions(const EnvState& state) const {
  const std::size_t base = base_action();
  ActionMask mask(action_count(), false);
  bool any_device = false;
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    // Same subtraction step() performs, so the return invariant holds bit-for-bit.
    if (state.uav_level - energy(state.position, i) >= energy(i, base)) {
      mask[i] = true;
      any_device = true;
    }
  }
  mask[base] = !any_device || state.uav_level >= energy(state.position, base);
  return mask;
}

StepOutcome Environment::step(const EnvState& state, Action action) {
  const std::size_t base = base_action();
  if (action.target >= action_count()) throw ContractViolation("step: action target out of range");
  if (!feasible_actions(state)[action.target]) {
    throw ContractViolation("step: action " + std::to_string(action.target) + " is not energy-feasible");
  }

  StepOutcome out;
  EnvState& next = out.next_state;
  next = state;
  const bool at_base = action.target == base;
  out.travel = energy(state.position, action.target);

  for (auto& a : next.aot) ++a;
  if (!at_base) {
    next.aot[action.target] = 1;
    out.attested = action.target;
  }
  out.throughput = throughput_[action.target];

  const SolarStep solar = solar_step(config_.solar, state.solar_state, rng_);
  out.harvested = solar.harvested;
  next.solar_state = solar.next_state;

  if (at_base) {
    out.charge = charge_amount(state.uav_level - out.travel, config_.uav_capacity, state.station_level);
  }
  const StationBattery station =
      station_update({state.station_level, config_.station_capacity}, at_base, out.charge, out.harvested);
  const UavBattery uav = uav_battery_update({state.uav_level, config_.uav_capacity}, out.travel, out.charge, at_base);
  next.station_level = station.level;
  next.uav_level = uav.level;
  next.position = action.target;
  next.slot = state.slot + 1;

  const double before = average_aot(state.aot);
  out.avg_aot = average_aot(next.aot);
  out.reward = config_.reward.flow * out.throughput + config_.reward.age * (before - out.avg_aot);
  return out;
}

Eigen::VectorXd Environment::observe(const EnvState& state) const {
  const auto n = static_cast<Eigen::Index>(devices_.size());
  Eigen::VectorXd obs(n + 3);
  for (Eigen::Index i = 0; i < n; ++i) obs(i) = static_cast<double>(state.aot[static_cast<std::size_t>(i)]) / config_.aot_norm;
  obs(n) = static_cast<double>(state.position + 1) / static_cast<double>(devices_.size() + 1);
  obs(n + 1) = state.uav_level / config_.uav_capacity;
  obs(n + 2) = state.station_level / config_.station_capacity;
  return obs;
}

}  // namespace aot
