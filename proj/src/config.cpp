#include "aotuav/config.hpp"

#include <fstream>

#include "aotuav/errors.hpp"

namespace aot {

namespace {

constexpr double kJoulesPerKwh = 1000.0 * kJoulesPerWh;

template <typename T>
void read(const nlohmann::json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end()) field = it->get<T>();
}

const nlohmann::json& section(const nlohmann::json& j, const char* key) {
  static const nlohmann::json empty = nlohmann::json::object();
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return *it;
}

}  // namespace

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "paper" || name == "full") {
    c.preset = "paper";
    return c;
  }
  if (name == "desk") {
    c.slots_per_episode = 500;
    c.episodes = 50;
    c.train_episodes = 40;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "' (expected paper or desk)");
}

void validate(const RunConfig& c) {
  validate(c.flight);
  validate(c.solar);
  if (c.solar.slot_seconds != c.flight.slot_seconds) throw ConfigError("solar and flight slot lengths differ");
  if (c.solar_initial_state >= SolarModel::kStates) throw ConfigError("solar initial_state out of range");
  if (!(c.uav_capacity > 0.0)) throw ConfigError("UAV battery capacity must be positive");
  if (!(c.station_capacity > 0.0)) throw ConfigError("station capacity must be positive");
  if (!(c.station_initial >= 0.0 && c.station_initial <= c.station_capacity)) {
    throw ConfigError("station initial level must lie in [0, capacity]");
  }
  if (c.reward.age < 0.0 || c.reward.flow < 0.0) throw ConfigError("reward weights must be non-negative");
  if (!(c.aot_norm > 0.0)) throw ConfigError("aot_norm must be positive");
  if (c.slots_per_episode == 0) throw ConfigError("slots_per_episode must be positive");
  if (c.episodes == 0) throw ConfigError("episodes must be positive");
  if (c.train_episodes >= c.episodes) throw ConfigError("train_episodes must be smaller than episodes");

  const auto& a = c.agent;
  if (!(a.gamma >= 0.0 && a.gamma <= 1.0)) throw ConfigError("gamma must lie in [0,1]");
  if (!(a.soft_tau > 0.0 && a.soft_tau <= 1.0)) throw ConfigError("soft_tau must lie in (0,1]");
  if (!(a.lr >= 0.0)) throw ConfigError("learning rate must be non-negative");
  if (a.batch == 0 || a.batch > a.buffer) throw ConfigError("batch must be in [1, buffer]");
  if (a.train_start < a.batch) throw ConfigError("train_start must be at least the batch size");
  if (a.target_period == 0) throw ConfigError("target_period must be positive");
  if (a.hidden == 0 || a.value_hidden == 0 || a.advantage_hidden == 0) throw ConfigError("hidden widths must be positive");
  if (!(a.alpha >= 0.0) || !(a.eps_priority > 0.0)) throw ConfigError("alpha >= 0 and eps_priority > 0 required");
  if (!(a.eps_start >= 0.0 && a.eps_start <= 1.0 && a.eps_end >= 0.0 && a.eps_end <= 1.0)) {
    throw ConfigError("exploration rates must lie in [0,1]");
  }
  if (!(a.beta_start >= 0.0 && a.beta_end >= 0.0 && a.beta_end <= 1.0)) throw ConfigError("beta schedule invalid");

  const auto& n = c.network;
  if (n.graph_file.empty()) {
    if (n.devices < 3) throw ConfigError("network needs at least 3 devices");
    if (!(n.region > 0.0 && n.radius > 0.0 && n.link_capacity > 0.0 && n.target_kbps > 0.0)) {
      throw ConfigError("network region, radius, capacity and target must be positive");
    }
  } else if (!std::filesystem::exists(n.graph_file)) {
    throw ConfigError("graph file not found: " + n.graph_file);
  }
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json transition = nlohmann::json::array();
  for (Eigen::Index r = 0; r < 4; ++r) {
    transition.push_back({c.solar.transition(r, 0), c.solar.transition(r, 1), c.solar.transition(r, 2),
                          c.solar.transition(r, 3)});
  }
  const auto& a = c.agent;
  const auto& f = c.flight;
  return {
      {"preset", c.preset},
      {"network",
       {{"graph_file", c.network.graph_file},
        {"devices", c.network.devices},
        {"region_m", c.network.region},
        {"radius_m", c.network.radius},
        {"link_capacity_kbps", c.network.link_capacity},
        {"target_kbps", c.network.target_kbps},
        {"topology_seed", c.network.topology_seed},
        {"base", {c.network.base.x, c.network.base.y}}}},
      {"flight",
       {{"blade_profile_power_w", f.blade_profile_power},
        {"induced_power_w", f.induced_power},
        {"tip_speed_mps", f.tip_speed},
        {"hover_induced_velocity_mps", f.hover_induced_velocity},
        {"fuselage_drag_ratio", f.fuselage_drag_ratio},
        {"air_density", f.air_density},
        {"rotor_solidity", f.rotor_solidity},
        {"rotor_area_m2", f.rotor_area},
        {"v_max_mps", f.v_max},
        {"slot_s", f.slot_seconds},
        {"altitude_m", f.altitude}}},
      {"battery",
       {{"uav_wh", c.uav_capacity / kJoulesPerWh},
        {"station_kwh", c.station_capacity / kJoulesPerKwh},
        {"station_initial_kwh", c.station_initial / kJoulesPerKwh}}},
      {"solar",
       {{"transition", transition},
        {"mu", c.solar.mu},
        {"sigma", c.solar.sigma},
        {"panel_m2", c.solar.panel_area},
        {"efficiency", c.solar.efficiency},
        {"initial_state", c.solar_initial_state}}},
      {"reward", {{"theta_age", c.reward.age}, {"theta_flow", c.reward.flow}}},
      {"observation", {{"aot_norm", c.aot_norm}}},
      {"initial_aot", c.initial_aot == InitialAot::Ones ? "ones" : "random"},
      {"agent",
       {{"lr", a.lr},
        {"gamma", a.gamma},
        {"eps_start", a.eps_start},
        {"eps_end", a.eps_end},
        {"beta_start", a.beta_start},
        {"beta_end", a.beta_end},
        {"alpha", a.alpha},
        {"eps_priority", a.eps_priority},
        {"batch", a.batch},
        {"buffer", a.buffer},
        {"target_period", a.target_period},
        {"soft_tau", a.soft_tau},
        {"train_start", a.train_start},
        {"hidden", a.hidden},
        {"value_hidden", a.value_hidden},
        {"advantage_hidden", a.advantage_hidden},
        {"adam_beta1", a.adam_beta1},
        {"adam_beta2", a.adam_beta2},
        {"adam_eps", a.adam_eps}}},
      {"episodes", c.episodes},
      {"slots_per_episode", c.slots_per_episode},
      {"train_episodes", c.train_episodes},
      {"seed", c.seed},
      {"greedy_eval", c.greedy_eval},
  };
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config document must be a JSON object");
  try {
    RunConfig c = preset_config(j.value("preset", std::string("paper")));

    const auto& net = section(j, "network");
    read(net, "graph_file", c.network.graph_file);
    read(net, "devices", c.network.devices);
    read(net, "region_m", c.network.region);
    read(net, "radius_m", c.network.radius);
    read(net, "link_capacity_kbps", c.network.link_capacity);
    read(net, "target_kbps", c.network.target_kbps);
    read(net, "topology_seed", c.network.topology_seed);
    if (auto it = net.find("base"); it != net.end()) c.network.base = {it->at(0).get<double>(), it->at(1).get<double>()};

    auto& f = c.flight;
    const auto& fl = section(j, "flight");
    read(fl, "blade_profile_power_w", f.blade_profile_power);
    read(fl, "induced_power_w", f.induced_power);
    read(fl, "tip_speed_mps", f.tip_speed);
    read(fl, "hover_induced_velocity_mps", f.hover_induced_velocity);
    read(fl, "fuselage_drag_ratio", f.fuselage_drag_ratio);
    read(fl, "air_density", f.air_density);
    read(fl, "rotor_solidity", f.rotor_solidity);
    read(fl, "rotor_area_m2", f.rotor_area);
    read(fl, "v_max_mps", f.v_max);
    read(fl, "slot_s", f.slot_seconds);
    read(fl, "altitude_m", f.altitude);

    const auto& bat = section(j, "battery");
    if (bat.contains("uav_wh")) c.uav_capacity = bat.at("uav_wh").get<double>() * kJoulesPerWh;
    if (bat.contains("station_kwh")) c.station_capacity = bat.at("station_kwh").get<double>() * kJoulesPerKwh;
    if (bat.contains("station_initial_kwh")) {
      c.station_initial = bat.at("station_initial_kwh").get<double>() * kJoulesPerKwh;
    }

    const auto& sol = section(j, "solar");
    if (auto it = sol.find("transition"); it != sol.end()) {
      if (!it->is_array() || it->size() != 4) throw ConfigError("solar.transition must be 4x4");
      for (Eigen::Index r = 0; r < 4; ++r) {
        const auto& row = it->at(static_cast<std::size_t>(r));
        if (!row.is_array() || row.size() != 4) throw ConfigError("solar.transition must be 4x4");
        for (Eigen::Index k = 0; k < 4; ++k) c.solar.transition(r, k) = row.at(static_cast<std::size_t>(k)).get<double>();
      }
    }
    read(sol, "mu", c.solar.mu);
    read(sol, "sigma", c.solar.sigma);
    read(sol, "panel_m2", c.solar.panel_area);
    read(sol, "efficiency", c.solar.efficiency);
    read(sol, "initial_state", c.solar_initial_state);
    c.solar.slot_seconds = f.slot_seconds;

    const auto& rw = section(j, "reward");
    read(rw, "theta_age", c.reward.age);
    read(rw, "theta_flow", c.reward.flow);
    read(section(j, "observation"), "aot_norm", c.aot_norm);
    if (auto it = j.find("initial_aot"); it != j.end()) {
      const auto mode = it->get<std::string>();
      if (mode == "ones") {
        c.initial_aot = InitialAot::Ones;
      } else if (mode == "random") {
        c.initial_aot = InitialAot::Random;
      } else {
        throw ConfigError("initial_aot must be 'ones' or 'random'");
      }
    }

    auto& a = c.agent;
    const auto& ag = section(j, "agent");
    read(ag, "lr", a.lr);
    read(ag, "gamma", a.gamma);
    read(ag, "eps_start", a.eps_start);
    read(ag, "eps_end", a.eps_end);
    read(ag, "beta_start", a.beta_start);
    read(ag, "beta_end", a.beta_end);
    read(ag, "alpha", a.alpha);
    read(ag, "eps_priority", a.eps_priority);
    read(ag, "batch", a.batch);
    read(ag, "buffer", a.buffer);
    read(ag, "target_period", a.target_period);
    read(ag, "soft_tau", a.soft_tau);
    read(ag, "train_start", a.train_start);
    read(ag, "hidden", a.hidden);
    read(ag, "value_hidden", a.value_hidden);
    read(ag, "advantage_hidden", a.advantage_hidden);
    read(ag, "adam_beta1", a.adam_beta1);
    read(ag, "adam_beta2", a.adam_beta2);
    read(ag, "adam_eps", a.adam_eps);

    read(j, "episodes", c.episodes);
    read(j, "slots_per_episode", c.slots_per_episode);
    read(j, "train_episodes", c.train_episodes);
    read(j, "seed", c.seed);
    read(j, "greedy_eval", c.greedy_eval);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunConfig c = config_from_json(j);
  // Relative graph paths are resolved against the config file's directory.
  if (!c.network.graph_file.empty() && std::filesystem::path(c.network.graph_file).is_relative()) {
    c.network.graph_file = (path.parent_path() / c.network.graph_file).lexically_normal().string();
  }
  return c;
}

}  // namespace aot
