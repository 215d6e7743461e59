#pragma once

#include "aotuav/config.hpp"
#include "aotuav/topology.hpp"

namespace fixture {

// Three relays between s and d on disjoint paths carrying 10, 20 and 20 Kbps, all within a
// short hop of the base at the origin. Device slots 0, 1, 2 are nodes 1, 2, 3.
inline aot::DeviceGraph three_relays() {
  aot::DeviceGraph g;
  g.nodes = {{1500, 1500}, {600, 0}, {0, 600}, {600, 600}, {200, 200}};
  g.source = 0;
  g.gateway = 4;
  auto link = [&](std::size_t a, std::size_t b, double kbps) { g.links.push_back({a, b, aot::to_milli(kbps)}); };
  link(0, 1, 10);
  link(1, 4, 10);
  link(0, 2, 20);
  link(2, 4, 20);
  link(0, 3, 20);
  link(3, 4, 20);
  return g;
}

// Short protocol over the default N3 setup.
inline aot::RunConfig small_run(std::size_t episodes = 3, std::size_t train = 2, std::size_t slots = 60) {
  aot::RunConfig c = aot::preset_config("desk");
  c.episodes = episodes;
  c.train_episodes = train;
  c.slots_per_episode = slots;
  c.agent.hidden = 16;
  c.agent.value_hidden = 16;
  c.agent.advantage_hidden = 16;
  c.agent.buffer = 200;
  c.agent.train_start = 40;
  c.agent.batch = 8;
  c.agent.target_period = 20;
  return c;
}

// Capacities large enough that no clamp can fire within any test horizon.
inline aot::RunConfig unclamped(aot::RunConfig c) {
  c.uav_capacity = 1e12;
  c.station_capacity = 1e15;
  c.station_initial = 1e12;
  return c;
}

}  // namespace fixture
