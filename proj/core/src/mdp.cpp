#include "mbq/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mbq {

namespace {

constexpr double kRowSumTolerance = 1e-12;

void require_same_shape(const QTable& a, const QTable& b) {
  if (!a.same_shape(b)) {
    throw SizeMismatchError(
        "q-table shapes differ: " + std::to_string(a.num_states) + "x" +
        std::to_string(a.num_actions) + " vs " +
        std::to_string(b.num_states) + "x" + std::to_string(b.num_actions));
  }
}

void require_sized_for(const TabularMdp& mdp, const QTable& q) {
  if (q.num_states != mdp.num_states || q.num_actions != mdp.num_actions) {
    throw SizeMismatchError("q-table is not sized for the MDP: " +
                            std::to_string(q.num_states) + "x" +
                            std::to_string(q.num_actions) + " vs " +
                            std::to_string(mdp.num_states) + "x" +
                            std::to_string(mdp.num_actions));
  }
}

}  // namespace

void validate_mdp(const TabularMdp& mdp) {
  if (mdp.num_states < 1 || mdp.num_actions < 1) {
    throw ValidationError("InvalidDimensions: num_states and num_actions "
                          "must be positive");
  }
  if (!(mdp.discount > 0.0) || !(mdp.discount < 1.0)) {
    throw ValidationError("DiscountOutOfRange: discount must lie in (0,1), "
                          "got " + std::to_string(mdp.discount));
  }
  const auto pairs = static_cast<std::size_t>(mdp.pair_count());
  if (mdp.reward.size() != pairs ||
      mdp.transition.size() != pairs * mdp.num_states) {
    throw ValidationError("InvalidDimensions: reward/transition arrays do "
                          "not match num_states x num_actions");
  }
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      double sum = 0.0;
      const auto row = mdp.transition_row(s, a);
      for (int next = 0; next < mdp.num_states; ++next) {
        const double p = row[static_cast<std::size_t>(next)];
        if (p < 0.0) {
          throw ValidationError(
              "NegativeProbability at (s=" + std::to_string(s) +
              ", a=" + std::to_string(a) + ", s'=" + std::to_string(next) +
              "): " + std::to_string(p));
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw ValidationError("RowNotStochastic at (s=" + std::to_string(s) +
                              ", a=" + std::to_string(a) +
                              "): row sums to " + std::to_string(sum));
      }
      const double r = mdp.reward[static_cast<std::size_t>(mdp.pair_index(s, a))];
      if (!std::isfinite(r) || std::abs(r) > mdp.reward_bound) {
        throw ValidationError("reward out of bound at (s=" + std::to_string(s) +
                              ", a=" + std::to_string(a) + "): " +
                              std::to_string(r) + " vs bound " +
                              std::to_string(mdp.reward_bound));
      }
    }
  }
}

GreedyPolicy greedy_policy(const QTable& q) {
  GreedyPolicy policy;
  policy.action.resize(static_cast<std::size_t>(q.num_states));
  for (int s = 0; s < q.num_states; ++s) {
    int best = 0;
    double best_value = q(s, 0);
    for (int a = 1; a < q.num_actions; ++a) {
      if (q(s, a) > best_value) {
        best_value = q(s, a);
        best = a;
      }
    }
    policy.action[static_cast<std::size_t>(s)] = best;
  }
  return policy;
}

std::vector<double> greedy_select(const QTable& policy_source,
                                  const QTable& target) {
  require_same_shape(policy_source, target);
  std::vector<double> selected(static_cast<std::size_t>(target.num_states));
  for (int s = 0; s < target.num_states; ++s) {
    int best = 0;
    double best_value = policy_source(s, 0);
    for (int a = 1; a < policy_source.num_actions; ++a) {
      if (policy_source(s, a) > best_value) {
        best_value = policy_source(s, a);
        best = a;
      }
    }
    selected[static_cast<std::size_t>(s)] = target(s, best);
  }
  return selected;
}

QTable bellman_optimality(const TabularMdp& mdp, const QTable& q) {
  require_sized_for(mdp, q);
  std::vector<double> state_max = greedy_select(q, q);
  QTable out = QTable::zeros(mdp.num_states, mdp.num_actions);
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      const auto row = mdp.transition_row(s, a);
      double lookahead = 0.0;
      for (int next = 0; next < mdp.num_states; ++next) {
        lookahead += row[static_cast<std::size_t>(next)] *
                     state_max[static_cast<std::size_t>(next)];
      }
      out(s, a) = mdp.reward[static_cast<std::size_t>(mdp.pair_index(s, a))] +
                  mdp.discount * lookahead;
    }
  }
  return out;
}

ValueIterationResult value_iteration(const TabularMdp& mdp, double tolerance,
                                     long max_iterations) {
  if (!(tolerance > 0.0)) {
    throw RangeError("value_iteration tolerance must be positive");
  }
  const double stop_gap = tolerance * (1.0 - mdp.discount) / mdp.discount;
  QTable q = QTable::zeros(mdp.num_states, mdp.num_actions);
  for (long iteration = 1; iteration <= max_iterations; ++iteration) {
    QTable next = bellman_optimality(mdp, q);
    const double gap = inf_norm_distance(next, q);
    q = std::move(next);
    if (gap <= stop_gap) {
      return {std::move(q), iteration};
    }
  }
  throw ConvergenceError("value_iteration did not converge within " +
                         std::to_string(max_iterations) + " iterations");
}

double inf_norm_distance(const QTable& a, const QTable& b) {
  require_same_shape(a, b);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    max_abs = std::max(max_abs, std::abs(a.values[i] - b.values[i]));
  }
  return max_abs;
}

double inf_norm(const QTable& q) {
  double max_abs = 0.0;
  for (const double v : q.values) max_abs = std::max(max_abs, std::abs(v));
  return max_abs;
}

}  // namespace mbq
