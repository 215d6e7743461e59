#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aotuav/adam.hpp"
#include "aotuav/config.hpp"
#include "aotuav/dueling_net.hpp"
#include "aotuav/environment.hpp"
#include "aotuav/replay.hpp"
#include "aotuav/rng.hpp"

namespace aot {

using QNet = DuelingParams<double>;

/// Highest-valued feasible action; ties go to the lowest index.
std::size_t masked_argmax(const Eigen::Ref<const Eigen::VectorXd>& q, const ActionMask& mask);

/// Epsilon-greedy over the feasible set: uniform over the mask with probability epsilon,
/// otherwise the masked argmax of the online network.
std::size_t select_action(const QNet& params, const Eigen::VectorXd& obs, const ActionMask& mask, double epsilon,
                          Rng& rng);

/// Double-DQN targets r + gamma * Q_target(s', argmax_{a feasible} Q_online(s', a)). The task is
/// continuing, so every transition bootstraps.
Eigen::VectorXd td_targets(std::span<const Transition* const> batch, const QNet& online, const QNet& target,
                           double gamma);

/// Linear interpolation from start to end as progress runs over [0, 1] (clamped).
double linear_schedule(double start, double end, double progress);

struct TrainStats {
  double loss = 0.0;
  bool synced_target = false;
};

/// Prioritized dueling double DQN learner: online and target networks, Adam state and replay.
class Agent {
 public:
  Agent(const AgentHyper& hyper, std::size_t obs_dim, std::size_t actions, std::uint64_t seed);

  const AgentHyper& hyper() const { return hyper_; }
  const QNet& online() const { return online_; }
  const QNet& target() const { return target_; }
  QNet& online_mut() { return online_; }
  const AdamState<double>& adam() const { return adam_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::uint64_t train_steps() const { return train_steps_; }

  std::size_t act(const Eigen::VectorXd& obs, const ActionMask& mask, double epsilon, Rng& rng) const {
    return select_action(online_, obs, mask, epsilon, rng);
  }

  void remember(Transition tr) { buffer_.insert(std::move(tr)); }

  /// One prioritized minibatch update at importance exponent `beta`; nullopt until the buffer
  /// holds train_start transitions. The target network is blended in every target_period steps.
  std::optional<TrainStats> train_step(double beta);

  void save(const std::filesystem::path& path) const;
  static Agent load(const std::filesystem::path& path, const AgentHyper& hyper);

  bool same_learned_state(const Agent& other) const;

 private:
  AgentHyper hyper_;
  QNet online_;
  QNet target_;
  AdamState<double> adam_;
  ReplayBuffer buffer_;
  Rng replay_rng_;
  std::uint64_t train_steps_ = 0;
};

}  // namespace aot
