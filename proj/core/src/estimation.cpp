#include "mbq/estimation.hpp"

#include <string>

namespace mbq {

EmpiricalModel::EmpiricalModel(int num_states, int num_actions)
    : num_states_(num_states), num_actions_(num_actions) {
  if (num_states < 1 || num_actions < 1) {
    throw ValidationError("EmpiricalModel dimensions must be positive");
  }
  const auto pairs = static_cast<std::size_t>(pair_count());
  visit_counts_.assign(pairs, 0);
  transition_counts_.assign(pairs * num_states_, 0);
  reward_sums_.assign(pairs, 0.0);
  support_.assign(pairs, {});
  unvisited_pairs_ = pair_count();
}

EmpiricalModel EmpiricalModel::restore(
    int num_states, int num_actions, std::vector<std::int64_t> visit_counts,
    std::vector<std::int64_t> transition_counts,
    std::vector<double> reward_sums) {
  EmpiricalModel model(num_states, num_actions);
  const auto pairs = static_cast<std::size_t>(model.pair_count());
  if (visit_counts.size() != pairs ||
      transition_counts.size() != pairs * static_cast<std::size_t>(num_states) ||
      reward_sums.size() != pairs) {
    throw ValidationError("model snapshot arrays do not match dimensions");
  }
  for (std::size_t pair = 0; pair < pairs; ++pair) {
    std::int64_t row_total = 0;
    for (int next = 0; next < num_states; ++next) {
      const std::int64_t c =
          transition_counts[pair * static_cast<std::size_t>(num_states) +
                            static_cast<std::size_t>(next)];
      if (c < 0) throw ValidationError("model snapshot has a negative count");
      if (c > 0) model.support_[pair].push_back(next);
      row_total += c;
    }
    if (row_total != visit_counts[pair]) {
      throw ValidationError(
          "model snapshot visit counts disagree with transition counts at "
          "pair " + std::to_string(pair));
    }
    if (visit_counts[pair] > 0) --model.unvisited_pairs_;
    model.total_steps_ += visit_counts[pair];
  }
  model.visit_counts_ = std::move(visit_counts);
  model.transition_counts_ = std::move(transition_counts);
  model.reward_sums_ = std::move(reward_sums);
  return model;
}

void EmpiricalModel::check_indices(int s, int a, int next) const {
  if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_ || next < 0 ||
      next >= num_states_) {
    throw IndexError("transition index out of range: (s=" + std::to_string(s) +
                     ", a=" + std::to_string(a) + ", s'=" +
                     std::to_string(next) + ")");
  }
}

void EmpiricalModel::record(const Transition& t) {
  record(t.state, t.action, t.next_state, t.reward);
}

void EmpiricalModel::record(int state, int action, int next_state,
                            double reward) {
  check_indices(state, action, next_state);
  const auto pair = static_cast<std::size_t>(pair_index(state, action));
  if (visit_counts_[pair] == 0) --unvisited_pairs_;
  ++visit_counts_[pair];
  auto& count = transition_counts_[tensor_index(state, action, next_state)];
  if (count == 0) support_[pair].push_back(next_state);
  ++count;
  reward_sums_[pair] += reward;
  ++total_steps_;
}

std::vector<double> EmpiricalModel::phat_row(int s, int a) const {
  check_indices(s, a, 0);
  std::vector<double> row(static_cast<std::size_t>(num_states_), 0.0);
  const std::int64_t n = visits(s, a);
  if (n == 0) return row;
  for (const int next : support(s, a)) {
    row[static_cast<std::size_t>(next)] =
        static_cast<double>(transition_counts_[tensor_index(s, a, next)]) /
        static_cast<double>(n);
  }
  return row;
}

double EmpiricalModel::rhat(int s, int a) const {
  check_indices(s, a, 0);
  const std::int64_t n = visits(s, a);
  if (n == 0) return 0.0;
  return reward_sums_[static_cast<std::size_t>(pair_index(s, a))] /
         static_cast<double>(n);
}

double EmpiricalModel::expected_value(
    int s, int a, std::span<const double> state_values) const {
  const std::int64_t n = visits(s, a);
  if (n == 0) return 0.0;
  double weighted = 0.0;
  for (const int next : support(s, a)) {
    weighted += static_cast<double>(
                    transition_counts_[tensor_index(s, a, next)]) *
                state_values[static_cast<std::size_t>(next)];
  }
  return weighted / static_cast<double>(n);
}

}  // namespace mbq
