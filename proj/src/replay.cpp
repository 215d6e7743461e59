#include "aotuav/replay.hpp"

#include <algorithm>
#include <cmath>

#include "aotuav/errors.hpp"

namespace aot {

SumTree::SumTree(std::size_t leaves) : leaves_(leaves), width_(1) {
  if (leaves == 0) throw DomainError("SumTree: needs at least one leaf");
  while (width_ < leaves) width_ <<= 1;
  sum_.assign(2 * width_, 0.0);
  max_.assign(2 * width_, 0.0);
}

void SumTree::set(std::size_t index, double value) {
  if (index >= leaves_) throw DomainError("SumTree: leaf index out of range");
  std::size_t node = width_ + index;
  sum_[node] = value;
  max_[node] = value;
  for (node >>= 1; node >= 1; node >>= 1) {
    sum_[node] = sum_[2 * node] + sum_[2 * node + 1];
    max_[node] = std::max(max_[2 * node], max_[2 * node + 1]);
  }
}

std::size_t SumTree::find(double mass) const {
  std::size_t node = 1;
  while (node < width_) {
    const std::size_t left = 2 * node;
    if (mass < sum_[left] || sum_[left + 1] <= 0.0) {
      node = left;
    } else {
      mass -= sum_[left];
      node = left + 1;
    }
  }
  return std::min(node - width_, leaves_ - 1);
}

double SumTree::max_inconsistency() const {
  double worst = 0.0;
  for (std::size_t node = 1; node < width_; ++node) {
    const double expect = sum_[2 * node] + sum_[2 * node + 1];
    worst = std::max(worst, std::abs(sum_[node] - expect) / std::max(1.0, std::abs(expect)));
  }
  return worst;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, double alpha, double eps_priority)
    : data_(capacity), tree_(capacity), raw_(capacity), alpha_(alpha), eps_priority_(eps_priority) {
  if (alpha < 0.0) throw DomainError("ReplayBuffer: alpha must be non-negative");
  if (!(eps_priority > 0.0)) throw DomainError("ReplayBuffer: eps_priority must be positive");
}

void ReplayBuffer::set_priority(std::size_t index, double p) {
  raw_.set(index, p);
  tree_.set(index, std::pow(p, alpha_));
}

void ReplayBuffer::insert(Transition tr) {
  const double p = size_ == 0 ? 1.0 : raw_.max();
  data_[next_] = std::move(tr);
  set_priority(next_, p);
  next_ = (next_ + 1) % data_.size();
  size_ = std::min(size_ + 1, data_.size());
}

std::optional<ReplaySample> ReplayBuffer::sample(std::size_t batch, double beta, Rng& rng) const {
  if (batch == 0 || size_ < batch) return std::nullopt;
  ReplaySample out;
  out.indices.reserve(batch);
  const double total = tree_.total();
  const double segment = total / static_cast<double>(batch);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < batch; ++k) {
    const double mass = std::min((static_cast<double>(k) + unit(rng)) * segment, std::nextafter(total, 0.0));
    std::size_t idx = tree_.find(mass);
    // Never hand out an unfilled slot.
    if (idx >= size_) idx = size_ - 1;
    out.indices.push_back(idx);
  }

  double max_w = 0.0;
  for (std::size_t idx : out.indices) {
    const double prob = tree_.get(idx) / total;
    out.probabilities.push_back(prob);
    const double w = std::pow(static_cast<double>(size_) * prob, -beta);
    out.weights.push_back(w);
    max_w = std::max(max_w, w);
    out.transitions.push_back(&data_[idx]);
  }
  for (double& w : out.weights) w /= max_w;
  return out;
}

void ReplayBuffer::update_priorities(std::span<const std::size_t> indices, std::span<const double> td_errors) {
  if (indices.size() != td_errors.size()) throw ShapeError("update_priorities: size mismatch");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= size_) throw DomainError("update_priorities: index not stored");
    set_priority(indices[k], std::abs(td_errors[k]) + eps_priority_);
  }
}

}  // namespace aot
