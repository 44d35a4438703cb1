#include "mbq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbq/diagnostics.hpp"
#include "mbq/environments.hpp"
#include "mbq/estimation.hpp"

namespace mbq {

namespace {

constexpr double kWindowSlack = 1e-12;  // relative, absorbs eps = sqrt(edge)

TailValue from_log(double log_value) {
  return {log_value, std::exp(log_value)};
}

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

void check_eps_window(double eps, double eps_sq_max, const char* lemma) {
  if (eps * eps > eps_sq_max * (1.0 + kWindowSlack)) {
    throw EpsOutOfValidityError(
        std::string(lemma) + ": eps = " + std::to_string(eps) +
            " outside the admissible interval [0, " +
            std::to_string(std::sqrt(eps_sq_max)) + "]",
        std::sqrt(eps_sq_max));
  }
}

void validate_inputs(const BoundInputs& in) {
  if (!(in.epsilon > 0.0)) throw RangeError("epsilon must be positive");
  if (!(in.delta > 0.0) || !(in.delta < 1.0)) {
    throw RangeError("delta must lie in (0,1)");
  }
  if (!(in.gamma > 0.0) || !(in.gamma < 1.0)) {
    throw RangeError("gamma must lie in (0,1)");
  }
  if (!(in.alpha > 0.0) || !(in.alpha < 1.0)) {
    throw RangeError("alpha must lie in (0,1)");
  }
  if (!(in.d_min > 0.0) || !(in.d_min <= 1.0)) {
    throw RangeError("d_min must lie in (0,1]");
  }
  if (in.num_pairs < 1) throw RangeError("num_pairs must be positive");
}

long ceil_at_least(double x, long floor_value) {
  return std::max(floor_value, static_cast<long>(std::ceil(x)));
}

}  // namespace

double hoeffding_tail(long n, double eps, double a, double b) {
  if (n < 1) throw RangeError("hoeffding_tail needs n >= 1");
  if (!(b > a)) throw RangeError("hoeffding_tail needs b > a");
  if (eps < 0.0) throw RangeError("hoeffding_tail needs eps >= 0");
  const double span = b - a;
  return 2.0 * std::exp(-2.0 * static_cast<double>(n) * eps * eps /
                        (span * span));
}

TailValue visitation_adjusted_tail(double A, double B, double eps, long k,
                                   double d) {
  if (!(A > 0.0) || !(B > 0.0)) {
    throw RangeError("visitation_adjusted_tail needs A, B > 0");
  }
  if (k < 1) throw RangeError("visitation_adjusted_tail needs k >= 1");
  if (!(d > 0.0) || !(d <= 1.0)) {
    throw RangeError("visitation_adjusted_tail needs d in (0,1]");
  }
  if (eps < 0.0) throw RangeError("eps must be >= 0");
  check_eps_window(eps, 1.59 / B, "visitation_adjusted_tail");
  const double kd = static_cast<double>(k) * d;
  return from_log(
      log_sum_exp(std::log(A) - kd * B * eps * eps / 2.0, -kd));
}

double p_tail_eps_max(double gamma) {
  const double one_minus = 1.0 - gamma;
  return std::sqrt(std::min(3.0, 3.0 / (one_minus * one_minus)));
}

double w_tail_eps_max(double gamma) {
  const double one_minus = 1.0 - gamma;
  return std::sqrt(
      std::min(12.0, 12.0 * gamma * gamma / (one_minus * one_minus)));
}

double theorem_eps_max(double gamma) {
  const double one_minus = 1.0 - gamma;
  return std::sqrt(
      36.0 / (one_minus * one_minus) *
      std::min(12.0, 3.0 * gamma * gamma / (one_minus * one_minus)));
}

TailValue p_tail_bound(long k, double eps, const BoundInputs& inputs) {
  if (k < 1) throw RangeError("p_tail_bound needs k >= 1");
  if (eps < 0.0) throw RangeError("eps must be >= 0");
  const double edge = p_tail_eps_max(inputs.gamma);
  check_eps_window(eps, edge * edge, "p_tail_bound");
  const double one_minus = 1.0 - inputs.gamma;
  return from_log(std::log(3.0 * static_cast<double>(inputs.num_pairs)) -
                  static_cast<double>(k) * inputs.d_min * one_minus *
                      one_minus * eps * eps / 4.0);
}

TailValue r_tail_bound(long k, double eps, const BoundInputs& inputs) {
  if (k < 1) throw RangeError("r_tail_bound needs k >= 1");
  if (eps < 0.0) throw RangeError("eps must be >= 0");
  const double edge = p_tail_eps_max(inputs.gamma);
  check_eps_window(eps, edge * edge, "r_tail_bound");
  return from_log(std::log(3.0 * static_cast<double>(inputs.num_pairs)) -
                  static_cast<double>(k) * inputs.d_min * eps * eps / 4.0);
}

TailValue w_tail_bound(long k, double eps, const BoundInputs& inputs) {
  if (k < 1) throw RangeError("w_tail_bound needs k >= 1");
  if (eps < 0.0) throw RangeError("eps must be >= 0");
  const double edge = w_tail_eps_max(inputs.gamma);
  check_eps_window(eps, edge * edge, "w_tail_bound");
  const double one_minus = 1.0 - inputs.gamma;
  return from_log(std::log(6.0 * static_cast<double>(inputs.num_pairs)) -
                  static_cast<double>(k) * inputs.d_min * one_minus *
                      one_minus * eps * eps / 16.0);
}

long data_collection_length(double d_min, long num_pairs, double delta) {
  if (!(d_min > 0.0) || !(d_min <= 1.0)) {
    throw RangeError("d_min must lie in (0,1]");
  }
  if (num_pairs < 1) throw RangeError("num_pairs must be positive");
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw RangeError("delta must lie in (0,1)");
  }
  return static_cast<long>(
      std::ceil(std::log(2.0 * static_cast<double>(num_pairs) / delta) /
                d_min));
}

BoundReport sample_complexity(const BoundInputs& inputs) {
  validate_inputs(inputs);
  const double gamma = inputs.gamma;
  const double alpha = inputs.alpha;
  const double eps = inputs.epsilon;
  const double one_minus = 1.0 - gamma;

  const double eps_max = theorem_eps_max(gamma);
  check_eps_window(eps, eps_max * eps_max, "sample_complexity");

  BoundReport report;
  report.inputs = inputs;
  report.eps_valid = true;
  report.eps_max = eps_max;
  report.eps_prime = one_minus * eps / 6.0;
  report.m = data_collection_length(inputs.d_min, inputs.num_pairs,
                                    inputs.delta);

  report.threshold_e1 = ceil_at_least(
      static_cast<double>(report.m) +
          std::log(6.0 / (eps * one_minus)) / (alpha * one_minus),
      report.m);
  report.threshold_e2 = ceil_at_least(
      static_cast<double>(report.m) +
          4.0 / (one_minus * alpha) *
              std::log(6.0 / (eps * one_minus * one_minus)),
      report.m);

  // E3: k >= m + 2 + C ln(24 k |S||A| / delta), solved from below.
  const double C =
      1152.0 / (eps * eps * one_minus * one_minus * one_minus * one_minus *
                inputs.d_min);
  const double log_arg = 24.0 * static_cast<double>(inputs.num_pairs) /
                         inputs.delta;
  const double base = static_cast<double>(report.m) + 2.0;
  double k = std::ceil(base + C * std::log(log_arg));
  bool converged = false;
  for (int iteration = 0; iteration < 200; ++iteration) {
    if (k > 9e15) {
      throw ConvergenceError(
          "E3 threshold exceeds the supported integer range");
    }
    const double next = std::ceil(base + C * std::log(log_arg * k));
    if (next == k) {
      converged = true;
      break;
    }
    k = next;
  }
  if (!converged) {
    throw ConvergenceError(
        "E3 fixed point failed to stabilize within 200 iterations");
  }
  report.threshold_e3 = ceil_at_least(k, report.m);

  report.k_star = std::max({report.threshold_e1, report.threshold_e2,
                            report.threshold_e3});

  const double eps_prime = report.eps_prime;
  const double p_edge = p_tail_eps_max(gamma);
  report.p_tail_valid = eps_prime <= p_edge;
  report.r_tail_valid = eps_prime <= p_edge;
  report.w_tail_valid = eps_prime <= w_tail_eps_max(gamma);
  if (report.p_tail_valid) {
    report.p_tail = p_tail_bound(report.k_star, eps_prime, inputs);
  }
  if (report.r_tail_valid) {
    report.r_tail = r_tail_bound(report.k_star, eps_prime, inputs);
  }
  if (report.w_tail_valid) {
    report.w_tail = w_tail_bound(report.k_star, eps_prime, inputs);
  }
  return report;
}

namespace {

enum class TailStat { p_deviation, r_deviation, w_norm };

TailCheck run_tail_trials(const TabularMdp& mdp, const std::vector<double>& d,
                          long k, double eps, long trials, std::uint64_t seed,
                          TailStat stat, const TailValue& analytic) {
  if (trials < 1) throw RangeError("trials must be >= 1");
  if (k < 1) throw RangeError("k must be >= 1");
  validate_mdp(mdp);
  SamplerSpec proto = SamplerSpec::iid(d, seed);
  validate_sampler(proto, mdp.pair_count(), /*require_positive=*/true);

  const QTable q_star = value_iteration(mdp, 1e-10).q;
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

  long exceed = 0;
  for (long trial = 0; trial < trials; ++trial) {
    SamplerSpec spec = proto;
    spec.seed = Rng::derive_seed(seed, static_cast<std::uint64_t>(trial));
    IidSampler sampler(spec, mdp);
    EmpiricalModel model(mdp.num_states, mdp.num_actions);
    for (long step = 0; step < k; ++step) model.record(sampler.next());

    double value = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) {
      for (int a = 0; a < mdp.num_actions; ++a) {
        const auto pair = static_cast<std::size_t>(mdp.pair_index(s, a));
        double entry = 0.0;
        switch (stat) {
          case TailStat::p_deviation:
            entry = model.expected_value(s, a, g) - pg[pair];
            break;
          case TailStat::r_deviation:
            entry = model.rhat(s, a) - mdp.reward[pair];
            break;
          case TailStat::w_norm:
            entry = model.rhat(s, a) - mdp.reward[pair] +
                    mdp.discount *
                        (model.expected_value(s, a, g) - pg[pair]);
            break;
        }
        value = std::max(value, std::abs(entry));
      }
    }
    if (value >= eps) ++exceed;
  }

  TailCheck check;
  check.trials = trials;
  check.empirical_freq =
      static_cast<double>(exceed) / static_cast<double>(trials);
  check.analytic = analytic;
  check.vacuous = analytic.value > 1.0;
  if (check.vacuous) {
    check.sound = true;
  } else {
    const double slack = 3.0 * std::sqrt(analytic.value *
                                          (1.0 - analytic.value) /
                                          static_cast<double>(trials));
    check.sound = check.empirical_freq <= analytic.value + slack;
  }
  return check;
}

BoundInputs inputs_for(const TabularMdp& mdp, const std::vector<double>& d) {
  BoundInputs in;
  in.epsilon = 1.0;
  in.delta = 0.5;
  in.gamma = mdp.discount;
  in.alpha = 0.5;
  in.d_min = min_mass(d);
  in.num_pairs = mdp.pair_count();
  return in;
}

}  // namespace

TailCheck monte_carlo_w_tail(const TabularMdp& mdp,
                             const std::vector<double>& d, long k, double eps,
                             long trials, std::uint64_t seed) {
  const TailValue analytic = w_tail_bound(k, eps, inputs_for(mdp, d));
  return run_tail_trials(mdp, d, k, eps, trials, seed, TailStat::w_norm,
                         analytic);
}

TailCheck monte_carlo_p_tail(const TabularMdp& mdp,
                             const std::vector<double>& d, long k, double eps,
                             long trials, std::uint64_t seed) {
  const TailValue analytic = p_tail_bound(k, eps, inputs_for(mdp, d));
  return run_tail_trials(mdp, d, k, eps, trials, seed, TailStat::p_deviation,
                         analytic);
}

TailCheck monte_carlo_r_tail(const TabularMdp& mdp,
                             const std::vector<double>& d, long k, double eps,
                             long trials, std::uint64_t seed) {
  const TailValue analytic = r_tail_bound(k, eps, inputs_for(mdp, d));
  return run_tail_trials(mdp, d, k, eps, trials, seed, TailStat::r_deviation,
                         analytic);
}

}  // namespace mbq
