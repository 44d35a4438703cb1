#include "mbq/learner.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mbq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBoundSlack = 1e-9;

void greedy_state_values(const QTable& q, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(q.num_states));
  for (int s = 0; s < q.num_states; ++s) {
    double best = q(s, 0);
    for (int a = 1; a < q.num_actions; ++a) best = std::max(best, q(s, a));
    out[static_cast<std::size_t>(s)] = best;
  }
}

void syncmbq_update(QTable& q, const EmpiricalModel& model, double alpha,
                    double gamma, std::vector<double>& state_max) {
  greedy_state_values(q, state_max);
  for (int s = 0; s < q.num_states; ++s) {
    for (int a = 0; a < q.num_actions; ++a) {
      const std::int64_t n = model.visits(s, a);
      double target = 0.0;
      if (n > 0) {
        target = model.reward_sum(s, a) / static_cast<double>(n) +
                 gamma * model.expected_value(s, a, state_max);
      }
      q(s, a) = (1.0 - alpha) * q(s, a) + alpha * target;
    }
  }
}

void qlearning_update(QTable& q, const Transition& t, double alpha,
                      double gamma) {
  double bootstrap = 0.0;
  if (!t.terminal) {
    bootstrap = q(t.next_state, 0);
    for (int a = 1; a < q.num_actions; ++a) {
      bootstrap = std::max(bootstrap, q(t.next_state, a));
    }
  }
  double& entry = q(t.state, t.action);
  entry += alpha * (t.reward + gamma * bootstrap - entry);
}

// Lemma-style scale bound r_max/(1-gamma); checked at every logged step
// whenever the initialization is inside it.
void check_iterate_bound(const QTable& q, double reward_bound, double gamma,
                         double q_init, long step) {
  const double bound = reward_bound / (1.0 - gamma);
  if (std::abs(q_init) > bound) return;
  const double norm = inf_norm(q);
  if (norm > bound + kBoundSlack) {
    throw Error("iterate bound violated at step " + std::to_string(step) +
                ": ||Q||_inf = " + std::to_string(norm) + " > " +
                std::to_string(bound));
  }
}

}  // namespace

void validate_config(const TrainerConfig& config, bool episodic) {
  if (!(config.step_size > 0.0) || !(config.step_size < 1.0)) {
    throw ValidationError("step_size must lie in (0,1), got " +
                          std::to_string(config.step_size));
  }
  if (!(config.discount > 0.0) || !(config.discount < 1.0)) {
    throw ValidationError("discount must lie in (0,1), got " +
                          std::to_string(config.discount));
  }
  if (config.warmup_steps < 0) {
    throw ValidationError("warmup_steps must be >= 0");
  }
  if (config.log_stride < 1) {
    throw ValidationError("log_stride must be >= 1");
  }
  const long budget = episodic ? config.total_episodes : config.total_steps;
  if (budget <= 0) {
    throw ValidationError(episodic ? "total_episodes must be positive"
                                   : "total_steps must be positive");
  }
}

QTable syncmbq_step(const QTable& q, const EmpiricalModel& model, double alpha,
                    double gamma) {
  if (q.num_states != model.num_states() ||
      q.num_actions != model.num_actions()) {
    throw SizeMismatchError("q-table is not sized for the empirical model");
  }
  QTable next = q;
  std::vector<double> state_max;
  syncmbq_update(next, model, alpha, gamma, state_max);
  return next;
}

QTable qlearning_step(const QTable& q, const Transition& t, double alpha,
                      double gamma) {
  if (t.state < 0 || t.state >= q.num_states || t.action < 0 ||
      t.action >= q.num_actions || t.next_state < 0 ||
      t.next_state >= q.num_states) {
    throw IndexError("transition indices out of range for the q-table");
  }
  QTable next = q;
  qlearning_update(next, t, alpha, gamma);
  return next;
}

RunTrace run_training(const TabularMdp& mdp, const TrainerConfig& config,
                      const QTable* oracle) {
  validate_config(config, /*episodic=*/false);
  if (config.sampler.mode != SamplerMode::iid) {
    throw ModeError("training on a known MDP requires an iid sampler");
  }
  RunTrace trace;
  QTable q = QTable::constant(mdp.num_states, mdp.num_actions, config.q_init);
  EmpiricalModel model(mdp.num_states, mdp.num_actions);
  IidSampler sampler(config.sampler, mdp);
  std::vector<double> state_max;

  for (long k = 1; k <= config.total_steps; ++k) {
    const Transition t = sampler.next();
    model.record(t);
    if (k > config.warmup_steps) {
      if (config.algorithm == Algorithm::syncmbq) {
        syncmbq_update(q, model, config.step_size, config.discount, state_max);
      } else {
        qlearning_update(q, t, config.step_size, config.discount);
      }
    }
    if (trace.visited_all_step < 0 && model.all_visited()) {
      trace.visited_all_step = k;
    }
    if (k % config.log_stride == 0 || k == config.total_steps) {
      check_iterate_bound(q, mdp.reward_bound, config.discount, config.q_init,
                          k);
      TraceRow row;
      row.step = k;
      row.inf_error = oracle ? inf_norm_distance(q, *oracle) : kNaN;
      row.episode_return = kNaN;
      row.all_visited = model.all_visited();
      row.q_max_abs = inf_norm(q);
      trace.rows.push_back(row);
    }
  }
  trace.final_q = std::move(q);
  trace.final_model = std::move(model);
  trace.total_env_steps = config.total_steps;
  return trace;
}

RunTrace run_training(const EpisodicEnv& env, const TrainerConfig& config,
                      const QTable* oracle) {
  validate_config(config, /*episodic=*/true);
  if (config.sampler.mode != SamplerMode::epsilon_greedy) {
    throw ModeError("episodic training requires an epsilon_greedy sampler");
  }
  RunTrace trace;
  QTable q =
      QTable::constant(env.num_states(), env.num_actions(), config.q_init);
  EmpiricalModel model(env.num_states(), env.num_actions());
  EpisodicSampler sampler(config.sampler, env);
  std::vector<double> state_max;

  long step = 0;
  long episode_len = 0;
  double episode_return = 0.0;
  for (long episode = 1; episode <= config.total_episodes;) {
    ++step;
    const Transition t = sampler.next(q);
    model.record(t);
    if (step > config.warmup_steps) {
      if (config.algorithm == Algorithm::syncmbq) {
        syncmbq_update(q, model, config.step_size, config.discount, state_max);
      } else {
        qlearning_update(q, t, config.step_size, config.discount);
      }
    }
    if (trace.visited_all_step < 0 && model.all_visited()) {
      trace.visited_all_step = step;
    }
    episode_return += t.reward;
    ++episode_len;
    const bool truncated = config.max_episode_len > 0 &&
                           episode_len >= config.max_episode_len &&
                           !t.terminal;
    if (t.terminal || truncated) {
      if (truncated) sampler.reset_episode();
      if (episode % config.log_stride == 0 ||
          episode == config.total_episodes) {
        check_iterate_bound(q, env.reward_bound(), config.discount,
                            config.q_init, step);
        TraceRow row;
        row.step = step;
        row.inf_error = oracle ? inf_norm_distance(q, *oracle) : kNaN;
        row.episode_return = episode_return;
        row.all_visited = model.all_visited();
        row.q_max_abs = inf_norm(q);
        trace.rows.push_back(row);
      }
      ++episode;
      episode_len = 0;
      episode_return = 0.0;
    }
  }
  trace.final_q = std::move(q);
  trace.final_model = std::move(model);
  trace.total_env_steps = step;
  return trace;
}

double evaluate_greedy(const EpisodicEnv& env, const QTable& q, long episodes,
                       long max_episode_len, std::uint64_t seed) {
  if (episodes < 1) throw RangeError("evaluate_greedy needs episodes >= 1");
  if (max_episode_len < 1) {
    throw RangeError("evaluate_greedy needs max_episode_len >= 1");
  }
  if (q.num_states != env.num_states() ||
      q.num_actions != env.num_actions()) {
    throw SizeMismatchError("q-table is not sized for the environment");
  }
  const GreedyPolicy policy = greedy_policy(q);
  Rng rng(seed);
  long successes = 0;
  for (long e = 0; e < episodes; ++e) {
    int state = env.reset(rng);
    for (long len = 0; len < max_episode_len; ++len) {
      const StepResult r =
          env.step(state, policy.action[static_cast<std::size_t>(state)], rng);
      if (r.terminal) {
        if (r.reward > 0.0) ++successes;
        break;
      }
      state = r.next_state;
    }
  }
  return static_cast<double>(successes) / static_cast<double>(episodes);
}

}  // namespace mbq
