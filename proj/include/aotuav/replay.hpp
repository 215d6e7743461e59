#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aotuav/environment.hpp"
#include "aotuav/rng.hpp"

namespace aot {

struct Transition {
  Eigen::VectorXd s;
  std::size_t a = 0;
  double r = 0.0;
  Eigen::VectorXd s_next;
  ActionMask mask_next;
};

/// Complete binary tree over a fixed number of leaves. Internal nodes hold the sum (and,
/// separately, the maximum) of their children and are recomputed from the children on every
/// write, so they never drift from the leaves.
class SumTree {
 public:
  explicit SumTree(std::size_t leaves);

  void set(std::size_t index, double value);
  double get(std::size_t index) const { return sum_[width_ + index]; }
  double total() const { return sum_[1]; }
  double max() const { return max_[1]; }
  std::size_t size() const { return leaves_; }

  /// Leaf whose cumulative range contains `mass`, for mass in [0, total()).
  std::size_t find(double mass) const;

  /// Largest |node - (left + right)| / max(1, node) over internal nodes.
  double max_inconsistency() const;

 private:
  std::size_t leaves_;
  std::size_t width_;
  std::vector<double> sum_;
  std::vector<double> max_;
};

struct ReplaySample {
  std::vector<std::size_t> indices;
  std::vector<const Transition*> transitions;
  std::vector<double> probabilities;  // P(i) = p_i^alpha / sum_k p_k^alpha
  std::vector<double> weights;        // importance weights scaled so the batch maximum is 1
};

/// Proportional prioritized replay over a ring of transitions.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, double alpha, double eps_priority);

  /// Stores at the current maximum priority (1 when empty), overwriting the oldest entry when full.
  void insert(Transition tr);

  /// Stratified draw of `batch` entries; nullopt while fewer than `batch` are stored.
  std::optional<ReplaySample> sample(std::size_t batch, double beta, Rng& rng) const;

  /// p_i = |td_error_i| + eps_priority.
  void update_priorities(std::span<const std::size_t> indices, std::span<const double> td_errors);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return data_.size(); }
  double alpha() const { return alpha_; }
  double eps_priority() const { return eps_priority_; }
  double priority(std::size_t index) const { return raw_.get(index); }
  double probability(std::size_t index) const { return tree_.get(index) / tree_.total(); }
  const Transition& at(std::size_t index) const { return data_.at(index); }
  const SumTree& tree() const { return tree_; }

 private:
  void set_priority(std::size_t index, double p);

  std::vector<Transition> data_;
  SumTree tree_;  // p_i^alpha
  SumTree raw_;   // p_i, for the running maximum
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double alpha_;
  double eps_priority_;
};

}  // namespace aot
