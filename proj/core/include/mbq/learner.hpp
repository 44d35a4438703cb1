#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mbq/environments.hpp"
#include "mbq/estimation.hpp"
#include "mbq/mdp.hpp"

namespace mbq {

enum class Algorithm { syncmbq, qlearning };

/// Training run parameters.  `total_steps` drives i.i.d. runs,
/// `total_episodes` episodic runs; `warmup_steps` is the data-collection
/// stage during which only the model is updated and the iterate stays
/// frozen.
struct TrainerConfig {
  double step_size = 0.1;
  double discount = 0.9;
  long warmup_steps = 0;
  long total_steps = 0;
  long total_episodes = 0;
  long max_episode_len = 0;  // episodic truncation; 0 = none
  SamplerSpec sampler;
  Algorithm algorithm = Algorithm::syncmbq;
  double q_init = 0.0;
  long log_stride = 1;
};

void validate_config(const TrainerConfig& config, bool episodic);

struct TraceRow {
  long step = 0;
  double inf_error = 0.0;       // ||Q_k - Q*||_inf, NaN without an oracle
  double episode_return = 0.0;  // NaN for i.i.d. runs
  bool all_visited = false;
  double q_max_abs = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  QTable final_q;
  std::optional<EmpiricalModel> final_model;
  long visited_all_step = -1;  // first step with every pair visited, -1 if never
  long total_env_steps = 0;
};

/// Damped full-vector Bellman update on the empirical model:
///   q'(s,a) = (1-alpha) q(s,a)
///           + alpha (rhat(s,a) + gamma sum_{s'} phat(s'|s,a) max_{a'} q(s',a')).
/// Unvisited pairs see zero estimators, so they decay toward zero.
QTable syncmbq_step(const QTable& q, const EmpiricalModel& model, double alpha,
                    double gamma);

/// Single-sample Q-learning update on entry (t.state, t.action); the
/// bootstrap term is dropped for terminal transitions.
QTable qlearning_step(const QTable& q, const Transition& t, double alpha,
                      double gamma);

/// Runs the configured algorithm with i.i.d. sampling on a known MDP.
/// Steps 1..warmup only update the model; later steps update the model
/// and then the iterate.  A row is logged every log_stride steps.
RunTrace run_training(const TabularMdp& mdp, const TrainerConfig& config,
                      const QTable* oracle = nullptr);

/// Episodic variant under the epsilon-greedy sampler.  One row is
/// logged every log_stride episodes, stamped with the global step count
/// and that episode's return.
RunTrace run_training(const EpisodicEnv& env, const TrainerConfig& config,
                      const QTable* oracle = nullptr);

/// Fraction of episodes whose greedy rollout reaches a positive-reward
/// terminal; truncated episodes count as failures.
double evaluate_greedy(const EpisodicEnv& env, const QTable& q, long episodes,
                       long max_episode_len, std::uint64_t seed);

}  // namespace mbq
