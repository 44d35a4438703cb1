#pragma once

#include <vector>

#include "mbq/mdp.hpp"
#include "mbq/rng.hpp"

namespace testsupport {

// 1 state, 1 action, self-loop, reward r.  Q* = r / (1 - gamma).
inline mbq::TabularMdp one_state_mdp(double r = 1.0, double gamma = 0.9) {
  mbq::TabularMdp mdp;
  mdp.num_states = 1;
  mdp.num_actions = 1;
  mdp.transition = {1.0};
  mdp.reward = {r};
  mdp.discount = gamma;
  mdp.reward_bound = std::max(1.0, std::abs(r));
  return mdp;
}

// s0 --(a0, r=0)--> s1; s1 absorbing with r=1.  At gamma = 0.9:
// Q*(s1) = 10, Q*(s0) = 9.
inline mbq::TabularMdp chain2_mdp(double gamma = 0.9) {
  mbq::TabularMdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 1;
  mdp.transition = {0.0, 1.0,   // s0 -> s1
                    0.0, 1.0};  // s1 -> s1
  mdp.reward = {0.0, 1.0};
  mdp.discount = gamma;
  mdp.reward_bound = 1.0;
  return mdp;
}

inline mbq::QTable random_qtable(int num_states, int num_actions,
                                 mbq::Rng& rng, double scale = 10.0) {
  mbq::QTable q = mbq::QTable::zeros(num_states, num_actions);
  for (double& v : q.values) v = rng.uniform(-scale, scale);
  return q;
}

}  // namespace testsupport
