#pragma once

#include <cmath>
#include <cstdint>

#include "aotuav/dueling_net.hpp"

namespace aot {

template <typename Scalar>
struct AdamState {
  DuelingParams<Scalar> first_moment;
  DuelingParams<Scalar> second_moment;
  std::uint64_t step_count = 0;
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);

  AdamState() = default;
  explicit AdamState(const DuelingParams<Scalar>& like, Scalar b1 = Scalar(0.9), Scalar b2 = Scalar(0.999),
                     Scalar e = Scalar(1e-8))
      : first_moment(like.zeros_like()), second_moment(like.zeros_like()), beta1(b1), beta2(b2), eps(e) {}

  bool operator==(const AdamState&) const = default;
};

/// Bias-corrected Adam step: params -= lr * m_hat / (sqrt(v_hat) + eps).
template <typename Scalar>
void apply_adam(DuelingParams<Scalar>& params, const DuelingParams<Scalar>& grads, AdamState<Scalar>& adam,
                Scalar lr) {
  ++adam.step_count;
  const auto t = static_cast<Scalar>(adam.step_count);
  const Scalar c1 = Scalar(1) - std::pow(adam.beta1, t);
  const Scalar c2 = Scalar(1) - std::pow(adam.beta2, t);
  const Scalar b1 = adam.beta1;
  const Scalar b2 = adam.beta2;
  const Scalar eps = adam.eps;
  for_each_block(
      [&](auto& w, const auto& g, auto& m, auto& v) {
        if (w.rows() != g.rows() || w.cols() != g.cols()) throw ShapeError("apply_adam: gradient shape mismatch");
        m = b1 * m + (Scalar(1) - b1) * g;
        v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
        w.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
      },
      params, grads, adam.first_moment, adam.second_moment);
}

}  // namespace aot
