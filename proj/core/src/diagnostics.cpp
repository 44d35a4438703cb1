#include "mbq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mbq {

namespace {

void require_model_shape(const EmpiricalModel& model, const QTable& q) {
  if (q.num_states != model.num_states() ||
      q.num_actions != model.num_actions()) {
    throw SizeMismatchError("q-table is not sized for the empirical model");
  }
}

std::vector<int> argmax_actions(const QTable& q) {
  std::vector<int> actions(static_cast<std::size_t>(q.num_states), 0);
  for (int s = 0; s < q.num_states; ++s) {
    double best = q(s, 0);
    for (int a = 1; a < q.num_actions; ++a) {
      if (q(s, a) > best) {
        best = q(s, a);
        actions[static_cast<std::size_t>(s)] = a;
      }
    }
  }
  return actions;
}

// w = Rhat - R + gamma (Phat - P) g, with g = Pi^{Q*} Q* and
// pg = P g precomputed by the caller.
void noise_into(const EmpiricalModel& model, const TabularMdp& mdp,
                std::span<const double> g, std::span<const double> pg,
                std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(model.pair_count()));
  for (int s = 0; s < model.num_states(); ++s) {
    for (int a = 0; a < model.num_actions(); ++a) {
      const auto pair = static_cast<std::size_t>(model.pair_index(s, a));
      out[pair] = model.rhat(s, a) - mdp.reward[pair] +
                  mdp.discount * (model.expected_value(s, a, g) - pg[pair]);
    }
  }
}

// out = (1-alpha) x + alpha gamma Phat (selection of x at `actions`).
void a_apply_into(const EmpiricalModel& model, const std::vector<int>& actions,
                  const QTable& x, double alpha, double gamma,
                  std::vector<double>& selected, std::vector<double>& out) {
  selected.resize(static_cast<std::size_t>(x.num_states));
  for (int s = 0; s < x.num_states; ++s) {
    selected[static_cast<std::size_t>(s)] =
        x(s, actions[static_cast<std::size_t>(s)]);
  }
  out.resize(x.values.size());
  for (int s = 0; s < x.num_states; ++s) {
    for (int a = 0; a < x.num_actions; ++a) {
      const auto pair = static_cast<std::size_t>(model.pair_index(s, a));
      out[pair] = (1.0 - alpha) * x.values[pair] +
                  alpha * gamma * model.expected_value(s, a, selected);
    }
  }
}

double inf_norm_vec(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

QTable noise_vector(const EmpiricalModel& model, const TabularMdp& mdp,
                    const QTable& q_star) {
  require_model_shape(model, q_star);
  if (q_star.num_states != mdp.num_states ||
      q_star.num_actions != mdp.num_actions) {
    throw SizeMismatchError("oracle q-table is not sized for the MDP");
  }
  const std::vector<double> g = greedy_select(q_star, q_star);
  std::vector<double> pg(static_cast<std::size_t>(mdp.pair_count()), 0.0);
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      const auto row = mdp.transition_row(s, a);
      double acc = 0.0;
      for (int next = 0; next < mdp.num_states; ++next) {
        acc += row[static_cast<std::size_t>(next)] *
               g[static_cast<std::size_t>(next)];
      }
      pg[static_cast<std::size_t>(mdp.pair_index(s, a))] = acc;
    }
  }
  QTable w = QTable::zeros(mdp.num_states, mdp.num_actions);
  noise_into(model, mdp, g, pg, w.values);
  return w;
}

QTable a_matrix_apply(const EmpiricalModel& model, const QTable& policy_source,
                      const QTable& x, double alpha, double gamma) {
  require_model_shape(model, x);
  if (!policy_source.same_shape(x)) {
    throw SizeMismatchError("policy_source and x shapes differ");
  }
  const std::vector<int> actions = argmax_actions(policy_source);
  QTable out = QTable::zeros(x.num_states, x.num_actions);
  std::vector<double> selected;
  a_apply_into(model, actions, x, alpha, gamma, selected, out.values);
  return out;
}

double a_matrix_inf_norm(const EmpiricalModel& model, const QTable&,
                         double alpha, double gamma) {
  // All entries of (1-alpha) I + alpha gamma Phat Pi are non-negative,
  // so the induced sup norm is the largest row sum: (1-alpha) plus
  // alpha gamma times the row mass of Phat.
  double max_row_sum = 0.0;
  for (int s = 0; s < model.num_states(); ++s) {
    for (int a = 0; a < model.num_actions(); ++a) {
      const std::int64_t n = model.visits(s, a);
      double mass = 0.0;
      if (n > 0) {
        std::int64_t total = 0;
        for (const int next : model.support(s, a)) {
          total += model.transition_count(s, a, next);
        }
        mass = static_cast<double>(total) / static_cast<double>(n);
      }
      max_row_sum = std::max(max_row_sum, (1.0 - alpha) + alpha * gamma * mass);
    }
  }
  return max_row_sum;
}

ComparisonState comparison_step(const ComparisonState& state,
                                const EmpiricalModel& model,
                                const QTable& q_current, const QTable& q_star,
                                const QTable& w, double alpha, double gamma) {
  ComparisonState next;
  next.q_upper_tilde =
      a_matrix_apply(model, q_current, state.q_upper_tilde, alpha, gamma);
  next.q_lower_tilde =
      a_matrix_apply(model, q_star, state.q_lower_tilde, alpha, gamma);
  if (!w.same_shape(state.q_upper_tilde)) {
    throw SizeMismatchError("noise vector shape differs from the iterates");
  }
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    next.q_upper_tilde.values[i] += alpha * w.values[i];
    next.q_lower_tilde.values[i] += alpha * w.values[i];
  }
  next.step = state.step + 1;
  return next;
}

ComparisonTrace run_with_comparisons(const TabularMdp& mdp,
                                     const TrainerConfig& config,
                                     double tolerance) {
  validate_mdp(mdp);
  validate_config(config, /*episodic=*/false);
  if (config.sampler.mode != SamplerMode::iid) {
    throw ModeError("comparison runs require an iid sampler");
  }
  if (config.algorithm != Algorithm::syncmbq) {
    throw ValidationError("comparison systems are defined for syncmbq runs");
  }
  const double alpha = config.step_size;
  const double gamma = config.discount;

  ComparisonTrace trace;
  trace.oracle_q = value_iteration(mdp, 1e-11).q;
  const QTable& q_star = trace.oracle_q;
  const std::vector<double> g = greedy_select(q_star, q_star);
  const std::vector<int> oracle_actions = argmax_actions(q_star);
  std::vector<double> pg(static_cast<std::size_t>(mdp.pair_count()), 0.0);
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      const auto row = mdp.transition_row(s, a);
      double acc = 0.0;
      for (int next = 0; next < mdp.num_states; ++next) {
        acc += row[static_cast<std::size_t>(next)] *
               g[static_cast<std::size_t>(next)];
      }
      pg[static_cast<std::size_t>(mdp.pair_index(s, a))] = acc;
    }
  }

  QTable q = QTable::constant(mdp.num_states, mdp.num_actions, config.q_init);
  QTable upper = q;  // tilde coordinates: Q^U - Q*, Q^L - Q*
  QTable lower = q;
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    upper.values[i] -= q_star.values[i];
    lower.values[i] -= q_star.values[i];
  }

  EmpiricalModel model(mdp.num_states, mdp.num_actions);
  IidSampler sampler(config.sampler, mdp);
  std::vector<double> w;
  std::vector<double> selected;
  std::vector<double> upper_next;
  std::vector<double> lower_next;
  std::vector<double> state_max(static_cast<std::size_t>(mdp.num_states));

  for (long k = 1; k <= config.total_steps; ++k) {
    const Transition t = sampler.next();
    model.record(t);
    if (trace.visited_all_step < 0 && model.all_visited()) {
      trace.visited_all_step = k;
    }
    noise_into(model, mdp, g, pg, w);

    if (k > config.warmup_steps) {
      // Switching signal of the upper system: greedy actions of the
      // current iterate, fixed before the iterate moves.
      const std::vector<int> current_actions = argmax_actions(q);
      a_apply_into(model, current_actions, upper, alpha, gamma, selected,
                   upper_next);
      a_apply_into(model, oracle_actions, lower, alpha, gamma, selected,
                   lower_next);
      for (std::size_t i = 0; i < w.size(); ++i) {
        upper_next[i] += alpha * w[i];
        lower_next[i] += alpha * w[i];
      }
      upper.values.swap(upper_next);
      lower.values.swap(lower_next);

      for (int s = 0; s < mdp.num_states; ++s) {
        state_max[static_cast<std::size_t>(s)] =
            q(s, current_actions[static_cast<std::size_t>(s)]);
      }
      for (int s = 0; s < mdp.num_states; ++s) {
        for (int a = 0; a < mdp.num_actions; ++a) {
          const std::int64_t n = model.visits(s, a);
          double target = 0.0;
          if (n > 0) {
            target = model.reward_sum(s, a) / static_cast<double>(n) +
                     gamma * model.expected_value(s, a, state_max);
          }
          q(s, a) = (1.0 - alpha) * q(s, a) + alpha * target;
        }
      }

      for (std::size_t i = 0; i < q.values.size(); ++i) {
        const double tilde = q.values[i] - q_star.values[i];
        if (tilde > upper.values[i] + tolerance ||
            tilde < lower.values[i] - tolerance) {
          throw SandwichViolationError(
              "sandwich violated at step " + std::to_string(k) + ", entry " +
                  std::to_string(i),
              k, static_cast<int>(i));
        }
      }
    }

    if (k % config.log_stride == 0 || k == config.total_steps) {
      ComparisonRow row;
      row.step = k;
      row.w_inf = inf_norm_vec(w);
      row.a_norm = a_matrix_inf_norm(model, q, alpha, gamma);
      row.sandwich_ok = true;
      row.up_err = inf_norm(upper);
      row.low_err = inf_norm(lower);
      row.main_err = inf_norm_distance(q, q_star);
      trace.rows.push_back(row);
    }
  }

  trace.final_inf_error = inf_norm_distance(q, q_star);
  trace.final_policy_matches_oracle =
      argmax_actions(q) == oracle_actions;
  trace.final_q = std::move(q);
  return trace;
}

ErrorDecomposition error_decomposition(long k, long m, double alpha,
                                       double gamma, double eps_prime) {
  if (k < m) {
    throw RangeError("InvalidRange: error_decomposition needs k >= m");
  }
  const double horizon = 1.0 / (1.0 - gamma);
  const long half_floor = (k - m) / 2;  // (k-m) - ceil((k-m)/2)
  ErrorDecomposition out;
  out.e1 = 2.0 * horizon * std::exp(-(1.0 - gamma) * alpha *
                                    static_cast<double>(k - m + 1));
  out.e2 = 2.0 * horizon * horizon *
           std::pow(1.0 - (1.0 - gamma) * alpha,
                    static_cast<double>(half_floor));
  out.e3 = 2.0 * horizon * eps_prime;
  return out;
}

}  // namespace mbq
