#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "aotuav/errors.hpp"

namespace aot {

/// Dueling Q-network weights: a shared rectified layer feeding a value stream and an
/// advantage stream, each with one rectified hidden layer. Layers store weights as
/// (out x in) so a batch of column observations propagates with left multiplication.
template <typename Scalar>
struct DuelingParams {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix shared_w, shared_b;
  Matrix value_hidden_w, value_hidden_b;
  Matrix value_out_w, value_out_b;
  Matrix adv_hidden_w, adv_hidden_b;
  Matrix adv_out_w, adv_out_b;

  static constexpr std::size_t kBlocks = 10;

  DuelingParams() = default;
  DuelingParams(Eigen::Index in_dim, Eigen::Index hidden, Eigen::Index value_hidden, Eigen::Index adv_hidden,
                Eigen::Index actions)
      : shared_w(Matrix::Zero(hidden, in_dim)),
        shared_b(Matrix::Zero(hidden, 1)),
        value_hidden_w(Matrix::Zero(value_hidden, hidden)),
        value_hidden_b(Matrix::Zero(value_hidden, 1)),
        value_out_w(Matrix::Zero(1, value_hidden)),
        value_out_b(Matrix::Zero(1, 1)),
        adv_hidden_w(Matrix::Zero(adv_hidden, hidden)),
        adv_hidden_b(Matrix::Zero(adv_hidden, 1)),
        adv_out_w(Matrix::Zero(actions, adv_hidden)),
        adv_out_b(Matrix::Zero(actions, 1)) {}

  Eigen::Index in_dim() const { return shared_w.cols(); }
  Eigen::Index actions() const { return adv_out_w.rows(); }

  /// Zero-initialised tensor with the same layout (gradients, optimizer moments).
  DuelingParams zeros_like() const {
    return DuelingParams(in_dim(), shared_w.rows(), value_hidden_w.rows(), adv_hidden_w.rows(), actions());
  }

  std::size_t parameter_count() const;
  bool operator==(const DuelingParams& o) const;
};

/// Applies f to corresponding blocks of one or more parameter sets, in declaration order.
template <typename F, typename P, typename... Rest>
void for_each_block(F&& f, P&& p, Rest&&... rest) {
  f(p.shared_w, rest.shared_w...);
  f(p.shared_b, rest.shared_b...);
  f(p.value_hidden_w, rest.value_hidden_w...);
  f(p.value_hidden_b, rest.value_hidden_b...);
  f(p.value_out_w, rest.value_out_w...);
  f(p.value_out_b, rest.value_out_b...);
  f(p.adv_hidden_w, rest.adv_hidden_w...);
  f(p.adv_hidden_b, rest.adv_hidden_b...);
  f(p.adv_out_w, rest.adv_out_w...);
  f(p.adv_out_b, rest.adv_out_b...);
}

template <typename Scalar>
std::size_t DuelingParams<Scalar>::parameter_count() const {
  std::size_t n = 0;
  for_each_block([&](const Matrix& m) { n += static_cast<std::size_t>(m.size()); }, *this);
  return n;
}

template <typename Scalar>
bool DuelingParams<Scalar>::operator==(const DuelingParams& o) const {
  bool same = true;
  for_each_block(
      [&](const Matrix& x, const Matrix& y) {
        same = same && x.rows() == y.rows() && x.cols() == y.cols() && x == y;
      },
      *this, o);
  return same;
}

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases of every layer.
template <typename Scalar, typename Gen>
void init_uniform_fan_in(DuelingParams<Scalar>& p, Gen& gen) {
  using Matrix = typename DuelingParams<Scalar>::Matrix;
  auto fill = [&gen](Matrix& w, Matrix& b) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = static_cast<Scalar>(u(gen));
    for (Eigen::Index k = 0; k < b.size(); ++k) b.data()[k] = static_cast<Scalar>(u(gen));
  };
  fill(p.shared_w, p.shared_b);
  fill(p.value_hidden_w, p.value_hidden_b);
  fill(p.value_out_w, p.value_out_b);
  fill(p.adv_hidden_w, p.adv_hidden_b);
  fill(p.adv_out_w, p.adv_out_b);
}

/// Activations of a forward pass over a batch (one observation per column).
template <typename Scalar>
struct DuelingForward {
  using Matrix = typename DuelingParams<Scalar>::Matrix;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  Matrix shared;        // H x B, post-ReLU
  Matrix value_hidden;  // Hv x B
  Matrix adv_hidden;    // Ha x B
  RowVector value;      // 1 x B
  Matrix advantage;     // |A| x B
  Matrix q;             // |A| x B
};

template <typename Scalar, typename Derived>
DuelingForward<Scalar> forward_batch(const DuelingParams<Scalar>& p, const Eigen::MatrixBase<Derived>& obs) {
  if (obs.rows() != p.in_dim()) {
    throw ShapeError("q_forward: observation length " + std::to_string(obs.rows()) + " != " +
                     std::to_string(p.in_dim()));
  }
  DuelingForward<Scalar> f;
  f.shared = ((p.shared_w * obs).colwise() + p.shared_b.col(0)).cwiseMax(Scalar(0));
  f.value_hidden = ((p.value_hidden_w * f.shared).colwise() + p.value_hidden_b.col(0)).cwiseMax(Scalar(0));
  f.adv_hidden = ((p.adv_hidden_w * f.shared).colwise() + p.adv_hidden_b.col(0)).cwiseMax(Scalar(0));
  f.value = (p.value_out_w * f.value_hidden).array() + p.value_out_b(0, 0);
  f.advantage = (p.adv_out_w * f.adv_hidden).colwise() + p.adv_out_b.col(0);
  const auto mean_adv = f.advantage.colwise().mean();
  f.q = f.advantage;
  f.q.rowwise() += f.value - mean_adv;
  return f;
}

template <typename Scalar>
struct QValues {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> q;
  Scalar value;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> advantage;
};

/// Q = V + A - mean(A) for a single observation.
template <typename Scalar, typename Derived>
QValues<Scalar> q_forward(const DuelingParams<Scalar>& p, const Eigen::MatrixBase<Derived>& obs) {
  const auto f = forward_batch(p, obs);
  return {f.q.col(0), f.value(0), f.advantage.col(0)};
}

template <typename Scalar>
struct LossAndGrad {
  Scalar loss = 0;
  DuelingParams<Scalar> grad;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> td_error;  // target - q(s,a) per sample
};

/// Importance-weighted squared TD loss  sum_i w_i (target_i - Q(s_i, a_i))^2  and its exact
/// gradient. Only the taken action's Q entry carries error; through the mean-advantage term it
/// reaches every advantage output.
template <typename Scalar, typename Derived>
LossAndGrad<Scalar> loss_and_gradients(const DuelingParams<Scalar>& p, const Eigen::MatrixBase<Derived>& obs,
                                       std::span<const std::size_t> actions, std::span<const Scalar> targets,
                                       std::span<const Scalar> weights) {
  using Matrix = typename DuelingParams<Scalar>::Matrix;
  const Eigen::Index batch = obs.cols();
  if (static_cast<Eigen::Index>(actions.size()) != batch || static_cast<Eigen::Index>(targets.size()) != batch ||
      static_cast<Eigen::Index>(weights.size()) != batch) {
    throw ShapeError("loss_and_gradients: batch sizes disagree");
  }
  const auto f = forward_batch(p, obs);
  const Eigen::Index n_actions = p.actions();

  LossAndGrad<Scalar> out;
  out.grad = p.zeros_like();
  out.td_error.resize(batch);

  Matrix dq = Matrix::Zero(n_actions, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto a = static_cast<Eigen::Index>(actions[static_cast<std::size_t>(b)]);
    if (a >= n_actions) throw ShapeError("loss_and_gradients: action index out of range");
    const Scalar err = targets[static_cast<std::size_t>(b)] - f.q(a, b);
    out.td_error(b) = err;
    out.loss += weights[static_cast<std::size_t>(b)] * err * err;
    dq(a, b) = Scalar(-2) * weights[static_cast<std::size_t>(b)] * err;
  }

  // q = v + A - mean(A)
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> dv = dq.colwise().sum();
  Matrix dadv = dq;
  dadv.rowwise() -= dv / static_cast<Scalar>(n_actions);

  auto& g = out.grad;
  g.value_out_w = dv * f.value_hidden.transpose();
  g.value_out_b(0, 0) = dv.sum();
  g.adv_out_w = dadv * f.adv_hidden.transpose();
  g.adv_out_b = dadv.rowwise().sum();

  const Matrix dvh = (p.value_out_w.transpose() * dv).cwiseProduct(
      (f.value_hidden.array() > Scalar(0)).template cast<Scalar>().matrix());
  const Matrix dah = (p.adv_out_w.transpose() * dadv).cwiseProduct(
      (f.adv_hidden.array() > Scalar(0)).template cast<Scalar>().matrix());
  g.value_hidden_w = dvh * f.shared.transpose();
  g.value_hidden_b = dvh.rowwise().sum();
  g.adv_hidden_w = dah * f.shared.transpose();
  g.adv_hidden_b = dah.rowwise().sum();

  const Matrix dshared = (p.value_hidden_w.transpose() * dvh + p.adv_hidden_w.transpose() * dah)
                             .cwiseProduct((f.shared.array() > Scalar(0)).template cast<Scalar>().matrix());
  g.shared_w = dshared * obs.transpose();
  g.shared_b = dshared.rowwise().sum();
  return out;
}

/// Target network <- tau * online + (1 - tau) * target, elementwise.
template <typename Scalar>
void soft_update(const DuelingParams<Scalar>& online, DuelingParams<Scalar>& target, Scalar tau) {
  if (!(tau > Scalar(0) && tau <= Scalar(1))) throw DomainError("soft_update: tau must lie in (0,1]");
  for_each_block([tau](auto& t, const auto& o) { t = tau * o + (Scalar(1) - tau) * t; }, target, online);
}

}  // namespace aot
