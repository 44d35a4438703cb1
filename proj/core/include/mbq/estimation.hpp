#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mbq/environments.hpp"
#include "mbq/errors.hpp"

namespace mbq {

/// Empirical MDP model: visit counts N(s,a), raw transition counts, and
/// reward sums.  Counts are stored exactly and normalized on demand, so
/// replaying a transition stream reproduces the model bit-for-bit.
///
/// Unvisited pairs expose an all-zero transition row and zero mean
/// reward, matching the zero initialization of the estimators.
class EmpiricalModel {
 public:
  EmpiricalModel(int num_states, int num_actions);

  /// Rebuilds a model from serialized counts, revalidating the
  /// invariants (visits = per-row count sums, nothing negative).
  static EmpiricalModel restore(int num_states, int num_actions,
                                std::vector<std::int64_t> visit_counts,
                                std::vector<std::int64_t> transition_counts,
                                std::vector<double> reward_sums);

  void record(const Transition& t);
  void record(int state, int action, int next_state, double reward);

  /// counts / N(s,a) if visited (sums to 1), else the all-zero row.
  std::vector<double> phat_row(int s, int a) const;

  /// Mean observed reward, 0 if unvisited.
  double rhat(int s, int a) const;

  /// True iff every (s,a) pair has been visited at least once.
  bool all_visited() const { return unvisited_pairs_ == 0; }

  std::int64_t visits(int s, int a) const {
    return visit_counts_[static_cast<std::size_t>(pair_index(s, a))];
  }
  std::int64_t transition_count(int s, int a, int next) const {
    return transition_counts_[tensor_index(s, a, next)];
  }
  double reward_sum(int s, int a) const {
    return reward_sums_[static_cast<std::size_t>(pair_index(s, a))];
  }
  std::int64_t total_steps() const { return total_steps_; }

  /// Next states with a positive count, in first-visit order.
  std::span<const int> support(int s, int a) const {
    return support_[static_cast<std::size_t>(pair_index(s, a))];
  }

  /// Empirical expectation sum_{s'} phat(s'|s,a) * state_values[s'],
  /// computed over the support; 0 for unvisited pairs.
  double expected_value(int s, int a,
                        std::span<const double> state_values) const;

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int pair_count() const { return num_states_ * num_actions_; }
  int pair_index(int s, int a) const { return s * num_actions_ + a; }

 private:
  std::size_t tensor_index(int s, int a, int next) const {
    return static_cast<std::size_t>(pair_index(s, a)) * num_states_ +
           static_cast<std::size_t>(next);
  }
  void check_indices(int s, int a, int next) const;

  int num_states_;
  int num_actions_;
  std::vector<std::int64_t> visit_counts_;
  std::vector<std::int64_t> transition_counts_;
  std::vector<double> reward_sums_;
  std::vector<std::vector<int>> support_;
  std::int64_t total_steps_ = 0;
  int unvisited_pairs_ = 0;
};

}  // namespace mbq
