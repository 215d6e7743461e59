#include "aotuav/agent.hpp"

#include <algorithm>

#include "aotuav/baselines.hpp"
#include "aotuav/errors.hpp"

namespace aot {

std::size_t masked_argmax(const Eigen::Ref<const Eigen::VectorXd>& q, const ActionMask& mask) {
  if (static_cast<Eigen::Index>(mask.size()) != q.size()) throw ShapeError("masked_argmax: mask size mismatch");
  std::optional<std::size_t> best;
  for (std::size_t a = 0; a < mask.size(); ++a) {
    if (!mask[a]) continue;
    if (!best || q(static_cast<Eigen::Index>(a)) > q(static_cast<Eigen::Index>(*best))) best = a;
  }
  if (!best) throw ContractViolation("masked_argmax: empty action mask");
  return *best;
}

std::size_t select_action(const QNet& params, const Eigen::VectorXd& obs, const ActionMask& mask, double epsilon,
                          Rng& rng) {
  const auto feasible = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (feasible == 0) throw ContractViolation("select_action: empty action mask");
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < epsilon) return rand_policy(mask, rng);
  }
  return masked_argmax(q_forward(params, obs).q, mask);
}

Eigen::VectorXd td_targets(std::span<const Transition* const> batch, const QNet& online, const QNet& target,
                           double gamma) {
  if (batch.empty()) throw ContractViolation("td_targets: empty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd next(online.in_dim(), n);
  for (Eigen::Index i = 0; i < n; ++i) next.col(i) = batch[static_cast<std::size_t>(i)]->s_next;
  const auto q_online = forward_batch(online, next).q;
  const auto q_target = forward_batch(target, next).q;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& tr = *batch[static_cast<std::size_t>(i)];
    const auto best = static_cast<Eigen::Index>(masked_argmax(q_online.col(i), tr.mask_next));
    y(i) = tr.r + gamma * q_target(best, i);
  }
  return y;
}

double linear_schedule(double start, double end, double progress) {
  const double t = std::clamp(progress, 0.0, 1.0);
  return (1.0 - t) * start + t * end;
}

Agent::Agent(const AgentHyper& hyper, std::size_t obs_dim, std::size_t actions, std::uint64_t seed)
    : hyper_(hyper),
      online_(static_cast<Eigen::Index>(obs_dim), static_cast<Eigen::Index>(hyper.hidden),
              static_cast<Eigen::Index>(hyper.value_hidden), static_cast<Eigen::Index>(hyper.advantage_hidden),
              static_cast<Eigen::Index>(actions)),
      buffer_(hyper.buffer, hyper.alpha, hyper.eps_priority),
      replay_rng_(derive_seed(seed, Stream::Replay)) {
  Rng init(derive_seed(seed, Stream::Init));
  init_uniform_fan_in(online_, init);
  target_ = online_;
  adam_ = AdamState<double>(online_, hyper.adam_beta1, hyper.adam_beta2, hyper.adam_eps);
}

std::optional<TrainStats> Agent::train_step(double beta) {
  if (buffer_.size() < hyper_.train_start) return std::nullopt;
  auto sample = buffer_.sample(hyper_.batch, beta, replay_rng_);
  if (!sample) return std::nullopt;

  const Eigen::VectorXd targets = td_targets(sample->transitions, online_, target_, hyper_.gamma);
  const auto n = static_cast<Eigen::Index>(sample->transitions.size());
  Eigen::MatrixXd obs(online_.in_dim(), n);
  std::vector<std::size_t> actions(sample->transitions.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    obs.col(i) = sample->transitions[static_cast<std::size_t>(i)]->s;
    actions[static_cast<std::size_t>(i)] = sample->transitions[static_cast<std::size_t>(i)]->a;
  }
  const auto result = loss_and_gradients<double>(online_, obs, actions, std::span(targets.data(), targets.size()),
                                                 sample->weights);
  apply_adam(online_, result.grad, adam_, hyper_.lr);
  buffer_.update_priorities(sample->indices, std::span(result.td_error.data(), result.td_error.size()));

  TrainStats stats{result.loss, false};
  ++train_steps_;
  if (train_steps_ % hyper_.target_period == 0) {
    soft_update(online_, target_, hyper_.soft_tau);
    stats.synced_target = true;
  }
  return stats;
}

bool Agent::same_learned_state(const Agent& other) const {
  return online_ == other.online_ && target_ == other.target_ && adam_ == other.adam_ &&
         train_steps_ == other.train_steps_ && replay_rng_ == other.replay_rng_;
}

}  // namespace aot
