#pragma once

#include <vector>

#include "mbq/estimation.hpp"
#include "mbq/learner.hpp"
#include "mbq/mdp.hpp"

namespace mbq {

/// Error coordinates of the comparison systems: q_upper_tilde is
/// Q^U - Q*, q_lower_tilde is Q^L - Q*.  Both start at Q_0 - Q*.
struct ComparisonState {
  QTable q_upper_tilde;
  QTable q_lower_tilde;
  long step = 0;
};

struct ComparisonRow {
  long step = 0;
  double w_inf = 0.0;
  double a_norm = 0.0;
  bool sandwich_ok = true;
  double up_err = 0.0;    // ||Q^U - Q*||_inf
  double low_err = 0.0;   // ||Q^L - Q*||_inf
  double main_err = 0.0;  // ||Q - Q*||_inf
};

struct ComparisonTrace {
  std::vector<ComparisonRow> rows;
  long visited_all_step = -1;
  QTable final_q;
  QTable oracle_q;
  double final_inf_error = 0.0;
  bool final_policy_matches_oracle = false;
};

/// Stochastic noise vector
///   w = Rhat - R + gamma (Phat - P) Pi^{Q*} Q*,
/// the estimation error evaluated along the greedy selection of Q*.
QTable noise_vector(const EmpiricalModel& model, const TabularMdp& mdp,
                    const QTable& q_star);

/// Applies A x = (1-alpha) x + alpha gamma Phat Pi^{policy_source} x
/// without materializing the matrix.
QTable a_matrix_apply(const EmpiricalModel& model, const QTable& policy_source,
                      const QTable& x, double alpha, double gamma);

/// Exact induced sup norm of (1-alpha) I + alpha gamma Phat Pi: the
/// maximum row sum, which equals 1 - (1-gamma) alpha for fully visited
/// models and 1 - alpha on rows of unvisited pairs.
double a_matrix_inf_norm(const EmpiricalModel& model,
                         const QTable& policy_source, double alpha,
                         double gamma);

/// One step of both comparison recursions: the upper system switches on
/// the greedy selector of the current iterate, the lower on that of Q*;
/// both are driven by the same alpha * w input.
ComparisonState comparison_step(const ComparisonState& state,
                                const EmpiricalModel& model,
                                const QTable& q_current, const QTable& q_star,
                                const QTable& w, double alpha, double gamma);

/// Co-evolves a training run and both comparison systems from one
/// transition stream, asserting the elementwise sandwich
/// Q^L - tol <= Q <= Q^U + tol every learning step.  Throws
/// SandwichViolationError on failure (an implementation-bug signal).
ComparisonTrace run_with_comparisons(const TabularMdp& mdp,
                                     const TrainerConfig& config,
                                     double tolerance = 1e-9);

/// The three error terms bounding ||Q_{k+1} - Q*||_inf after the
/// data-collection stage:
///   E1 = 2/(1-gamma) exp(-(1-gamma) alpha (k-m+1))
///   E2 = 2/(1-gamma)^2 (1-(1-gamma) alpha)^(k-m-ceil((k-m)/2))
///   E3 = 2/(1-gamma) eps_prime
struct ErrorDecomposition {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
};

ErrorDecomposition error_decomposition(long k, long m, double alpha,
                                       double gamma, double eps_prime);

}  // namespace mbq
