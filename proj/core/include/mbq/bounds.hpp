#pragma once

#include <cstdint>
#include <vector>

#include "mbq/mdp.hpp"

namespace mbq {

/// Parameters of the concentration and sample-complexity formulas.
struct BoundInputs {
  double epsilon = 0.0;  // target accuracy, > 0
  double delta = 0.0;    // failure probability, in (0,1)
  double gamma = 0.0;    // discount, in (0,1)
  double alpha = 0.0;    // step size, in (0,1)
  double d_min = 0.0;    // minimum sampling mass, in (0,1]
  long num_pairs = 0;    // |S||A|
};

/// A probability upper bound in both linear and log form.  The linear
/// value may underflow to 0 or exceed 1 (vacuous); the log form always
/// carries the magnitude.
struct TailValue {
  double log_value = 0.0;
  double value = 0.0;
};

/// Two-sided Hoeffding tail for n i.i.d. samples in [a, b]:
///   2 exp(-2 n eps^2 / (b-a)^2).
/// Not clamped; values above 1 are vacuous.
double hoeffding_tail(long n, double eps, double a, double b);

/// Visitation-adjusted tail: given a conditional bound
/// A exp(-t B eps^2) at t visits, the unconditional bound over a
/// d-frequent pair after k steps is
///   A exp(-k d B eps^2 / 2) + exp(-k d),   valid for eps^2 <= 1.59/B.
TailValue visitation_adjusted_tail(double A, double B, double eps, long k,
                                   double d);

/// P[ ||(Phat_k - P) Pi^{Q*} Q*||_inf >= eps ]
///   <= 3 |S||A| exp(-k d_min (1-gamma)^2 eps^2 / 4),
/// valid for eps^2 in [0, min{3, 3/(1-gamma)^2}].
TailValue p_tail_bound(long k, double eps, const BoundInputs& inputs);

/// P[ ||Rhat_k - R||_inf >= eps ] <= 3 |S||A| exp(-k d_min eps^2 / 4),
/// same validity window as p_tail_bound.
TailValue r_tail_bound(long k, double eps, const BoundInputs& inputs);

/// P[ ||w_k||_inf >= eps ]
///   <= 6 |S||A| exp(-k d_min (1-gamma)^2 eps^2 / 16),
/// valid for eps^2 in [0, min{12, 12 gamma^2/(1-gamma)^2}].
TailValue w_tail_bound(long k, double eps, const BoundInputs& inputs);

/// Largest admissible epsilon of each validity window.
double p_tail_eps_max(double gamma);
double w_tail_eps_max(double gamma);
double theorem_eps_max(double gamma);

/// Data-collection length m = ceil( ln(2 |S||A| / delta) / d_min ),
/// after which every pair has been visited with probability >= 1 - delta/2.
long data_collection_length(double d_min, long num_pairs, double delta);

/// Evaluated sample-complexity certificate: the data-collection length,
/// the three explicit step thresholds, and their maximum k_star.
struct BoundReport {
  BoundInputs inputs;
  long m = 0;
  long threshold_e1 = 0;
  long threshold_e2 = 0;
  long threshold_e3 = 0;
  long k_star = 0;
  bool eps_valid = false;
  double eps_max = 0.0;    // theorem window edge for these inputs
  double eps_prime = 0.0;  // (1-gamma) eps / 6, the proof's noise level
  TailValue p_tail, r_tail, w_tail;  // at (k_star, eps_prime)
  bool p_tail_valid = false;
  bool r_tail_valid = false;
  bool w_tail_valid = false;
};

/// Evaluates all three thresholds.  The implicit E3 inequality
///   k >= m + 2 + 1152 / (eps^2 (1-gamma)^4 d_min) * ln(24 k |S||A| / delta)
/// is solved for the smallest integer k by fixed-point iteration from
/// the log-free lower bound.
BoundReport sample_complexity(const BoundInputs& inputs);

/// One empirical-vs-analytic tail comparison.
struct TailCheck {
  double empirical_freq = 0.0;
  TailValue analytic;
  bool vacuous = false;  // analytic bound above 1
  bool sound = false;    // freq <= bound + 3 binomial std errors, or vacuous
  long trials = 0;
};

/// Runs `trials` independent k-step i.i.d. estimation passes on the
/// ground-truth MDP and compares the frequency of ||w_k||_inf >= eps
/// against w_tail_bound.  p/r variants check the two estimator bounds.
TailCheck monte_carlo_w_tail(const TabularMdp& mdp,
                             const std::vector<double>& d, long k, double eps,
                             long trials, std::uint64_t seed);
TailCheck monte_carlo_p_tail(const TabularMdp& mdp,
                             const std::vector<double>& d, long k, double eps,
                             long trials, std::uint64_t seed);
TailCheck monte_carlo_r_tail(const TabularMdp& mdp,
                             const std::vector<double>& d, long k, double eps,
                             long trials, std::uint64_t seed);

}  // namespace mbq
