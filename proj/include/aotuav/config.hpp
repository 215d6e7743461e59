#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "aotuav/kinetics.hpp"
#include "aotuav/power.hpp"
#include "aotuav/topology.hpp"

namespace aot {

/// Where the device graph comes from: an explicit file, or a seeded random geometric graph
/// whose uniform link capacity is rescaled so the unattested throughput equals `target_kbps`.
struct NetworkSetup {
  std::string graph_file;
  std::size_t devices = 7;
  double region = 2500.0;  // m, side of the square
  double radius = 1300.0;  // m, link range
  double link_capacity = 10.0;  // Kbps before rescaling
  double target_kbps = 50.0;
  std::uint64_t topology_seed = 1;
  Coordinate base{0.0, 0.0};
};

struct RewardWeights {
  double age = 10.0;   // weight on the drop in average AoT
  double flow = 0.5;   // weight on the slot's throughput
};

struct AgentHyper {
  double lr = 1e-4;
  double gamma = 0.5;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double beta_start = 0.6;
  double beta_end = 1.0;
  double alpha = 0.2;
  double eps_priority = 1e-5;
  std::size_t batch = 32;
  std::size_t buffer = 4000;
  std::size_t target_period = 200;
  double soft_tau = 0.01;
  std::size_t train_start = 320;
  std::size_t hidden = 256;
  std::size_t value_hidden = 256;
  std::size_t advantage_hidden = 256;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

enum class InitialAot { Ones, Random };

struct RunConfig {
  std::string preset = "paper";
  NetworkSetup network;
  FlightParams flight;
  double uav_capacity = 77.0 * kJoulesPerWh;                // J
  double station_capacity = 770.0 * kJoulesPerWh;           // J
  double station_initial = 385.0 * kJoulesPerWh;            // J
  SolarModel solar;
  std::size_t solar_initial_state = 0;
  RewardWeights reward;
  double aot_norm = 50.0;
  InitialAot initial_aot = InitialAot::Ones;
  AgentHyper agent;
  std::size_t episodes = 100;
  std::size_t slots_per_episode = 2000;
  std::size_t train_episodes = 80;
  std::uint64_t seed = 1;
  bool greedy_eval = false;
};

/// Named starting points: "paper" (full-length protocol) and "desk" (500 slots, 40 + 10 episodes).
RunConfig preset_config(const std::string& name);

/// Throws ConfigError describing the first violated constraint.
void validate(const RunConfig& config);

/// JSON with energies in the units operators quote them in (Wh, kWh); unspecified keys keep
/// the defaults of the named preset.
nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace aot
