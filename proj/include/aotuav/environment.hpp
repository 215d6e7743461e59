#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aotuav/config.hpp"
#include "aotuav/power.hpp"
#include "aotuav/topology.hpp"

namespace aot {

/// Feasible-action bitmap, indexed like Action::target.
using ActionMask = std::vector<bool>;

/// Positions and action targets are 0-based: 0..|V|-1 are the attestable devices in
/// ascending node order, |V| is the base.
struct EnvState {
  std::vector<std::int64_t> aot;  // slots since each device was last attested, >= 1
  std::size_t position = 0;
  double uav_level = 0.0;      // J
  double station_level = 0.0;  // J
  std::size_t solar_state = 0;  // not observed by the agent
  std::size_t slot = 0;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct Action {
  std::size_t target = 0;
};

struct StepOutcome {
  EnvState next_state;
  double reward = 0.0;
  double throughput = 0.0;  // Kbps delivered during the slot
  double avg_aot = 0.0;     // average AoT after the slot
  std::optional<std::size_t> attested;
  double travel = 0.0;     // J spent flying
  double charge = 0.0;     // J moved from the station to the UAV
  double harvested = 0.0;  // J of solar arrivals at the station
};

double average_aot(std::span<const std::int64_t> aot);

/// One UAV, its charging station and the device network. Owns the solar random stream.
class Environment {
 public:
  /// Builds (or loads) the topology, precomputes throughputs and pairwise flight energies and
  /// checks that the region is flyable. Throws ConfigError on any inconsistency.
  explicit Environment(const RunConfig& config);

  /// Uses an explicit graph instead of the one described by config.network.
  Environment(const RunConfig& config, DeviceGraph graph);

  const RunConfig& config() const { return config_; }
  const DeviceGraph& graph() const { return graph_; }
  const ThroughputTable& table() const { return table_; }
  std::size_t device_count() const { return devices_.size(); }
  std::size_t action_count() const { return devices_.size() + 1; }
  std::size_t base_action() const { return devices_.size(); }
  std::size_t observation_size() const { return devices_.size() + 3; }

  /// Node index in the graph of device slot `device`.
  std::size_t node_of(std::size_t device) const { return devices_.at(device); }
  Coordinate position_of(std::size_t position) const;

  /// Flight energy between two positions (device slots or base).
  double energy(std::size_t from, std::size_t to) const { return energy_(from, to); }

  /// Slot throughput when attesting `device`, or the full rate for the base action.
  double throughput_for(std::size_t target) const { return throughput_[target]; }

  EnvState reset(std::uint64_t seed);

  /// Devices reachable with enough energy left to get home, plus the base. When no device
  /// qualifies the mask holds the base alone.
  ActionMask feasible_actions(const EnvState& state) const;

  StepOutcome step(const EnvState& state, Action action);

  /// [aot_1..aot_|V| / aot_norm, (position+1)/(|V|+1), uav_level/B_max, station_level/B_station_max]
  Eigen::VectorXd observe(const EnvState& state) const;

 private:
  void initialise();

  RunConfig config_;
  DeviceGraph graph_;
  ThroughputTable table_;
  std::vector<std::size_t> devices_;
  std::vector<double> throughput_;
  Eigen::MatrixXd energy_;
  Rng rng_;
};

/// Graph described by a config: loaded from file, or generated and rescaled to the target rate.
DeviceGraph build_graph(const NetworkSetup& setup);

}  // namespace aot
