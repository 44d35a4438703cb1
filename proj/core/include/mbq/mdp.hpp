#pragma once

#include <span>
#include <vector>

#include "mbq/errors.hpp"

namespace mbq {

/// Finite Markov decision process with dense transition tensor.
///
/// `transition` is row-major over (s, a, s'): the probability of moving
/// to s' after taking action a in state s.  `reward` stores the expected
/// immediate reward per (s, a).  `reward_bound` is the largest absolute
/// reward the process can emit; value-scale invariants are expressed as
/// reward_bound / (1 - discount).
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> transition;  // (s, a, s') row-major
  std::vector<double> reward;      // (s, a) row-major
  double discount = 0.0;
  double reward_bound = 0.0;

  int pair_count() const { return num_states * num_actions; }
  int pair_index(int s, int a) const { return s * num_actions + a; }

  std::span<const double> transition_row(int s, int a) const {
    return {transition.data() +
                static_cast<std::size_t>(pair_index(s, a)) * num_states,
            static_cast<std::size_t>(num_states)};
  }
  double prob(int s, int a, int next) const {
    return transition_row(s, a)[static_cast<std::size_t>(next)];
  }
};

/// Dense action-value table over (s, a), row-major like TabularMdp.
struct QTable {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> values;

  static QTable constant(int num_states, int num_actions, double value) {
    QTable q;
    q.num_states = num_states;
    q.num_actions = num_actions;
    q.values.assign(
        static_cast<std::size_t>(num_states) * num_actions, value);
    return q;
  }
  static QTable zeros(int num_states, int num_actions) {
    return constant(num_states, num_actions, 0.0);
  }

  double& operator()(int s, int a) {
    return values[static_cast<std::size_t>(s) * num_actions + a];
  }
  double operator()(int s, int a) const {
    return values[static_cast<std::size_t>(s) * num_actions + a];
  }

  int size() const { return num_states * num_actions; }
  bool same_shape(const QTable& other) const {
    return num_states == other.num_states && num_actions == other.num_actions;
  }
};

/// Deterministic greedy policy: action(s) = argmax_a q(s, a), lowest
/// action index on ties.
struct GreedyPolicy {
  std::vector<int> action;
};

/// Checks all TabularMdp invariants: every transition row sums to 1
/// within 1e-12 with no negative entry, |reward| <= reward_bound, and
/// discount in (0, 1).  Throws ValidationError naming the offender.
void validate_mdp(const TabularMdp& mdp);

GreedyPolicy greedy_policy(const QTable& q);

/// Selection operator: V(s) = target(s, argmax_a policy_source(s, a)).
/// With policy_source == target this is the per-state max.
std::vector<double> greedy_select(const QTable& policy_source,
                                  const QTable& target);

/// One Bellman optimality backup:
///   (TQ)(s,a) = R(s,a) + discount * sum_{s'} P(s'|s,a) max_{a'} q(s',a').
QTable bellman_optimality(const TabularMdp& mdp, const QTable& q);

struct ValueIterationResult {
  QTable q;
  long iterations = 0;
};

/// Iterates the Bellman backup until the certified error bound
/// ||Q - Q*||_inf <= tolerance holds.  The stop rule uses the
/// contraction factor: iteration ends once the successive-iterate gap
/// drops below tolerance * (1 - discount) / discount, which bounds the
/// returned iterate's distance to the fixed point by tolerance.
ValueIterationResult value_iteration(const TabularMdp& mdp, double tolerance,
                                     long max_iterations = 10'000'000);

double inf_norm_distance(const QTable& a, const QTable& b);
double inf_norm(const QTable& q);

}  // namespace mbq
