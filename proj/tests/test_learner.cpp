#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mbq/bounds.hpp"
#include "mbq/learner.hpp"
#include "support.hpp"

using namespace mbq;
using testsupport::chain2_mdp;
using testsupport::one_state_mdp;

namespace {

TrainerConfig iid_config(long steps, std::uint64_t seed, int pair_count,
                         double alpha = 0.1, double gamma = 0.9) {
  TrainerConfig config;
  config.step_size = alpha;
  config.discount = gamma;
  config.total_steps = steps;
  config.sampler = SamplerSpec::iid_uniform(pair_count, seed);
  config.log_stride = 1;
  return config;
}

}  // namespace

TEST_CASE("syncmbq_step keeps zero tables at zero under an empty model") {
  EmpiricalModel model(3, 2);
  const QTable q = QTable::zeros(3, 2);
  CHECK(inf_norm(syncmbq_step(q, model, 0.1, 0.9)) == 0.0);
}

TEST_CASE("syncmbq_step single-step arithmetic") {
  EmpiricalModel model(1, 1);
  model.record(0, 0, 0, 1.0);
  const QTable q = QTable::zeros(1, 1);
  const QTable next = syncmbq_step(q, model, 0.5, 0.9);
  CHECK(next(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("syncmbq_step decays unvisited pairs toward zero") {
  EmpiricalModel model(2, 1);
  model.record(0, 0, 0, 1.0);  // (1,0) stays unvisited
  QTable q = QTable::constant(2, 1, 4.0);
  const QTable next = syncmbq_step(q, model, 0.25, 0.9);
  CHECK(next(1, 0) == doctest::Approx(3.0).epsilon(1e-15));  // (1-alpha) q
}

TEST_CASE("syncmbq_step fixes the empirical Bellman solution") {
  // Build a fully-visited model, solve the empirical MDP exactly, and
  // check the update leaves that solution in place.
  EmpiricalModel model(3, 2);
  Rng rng(4);
  for (int i = 0; i < 4000; ++i) {
    model.record(rng.uniform_int(3), rng.uniform_int(2), rng.uniform_int(3),
                 rng.uniform(-1.0, 1.0));
  }
  REQUIRE(model.all_visited());
  TabularMdp empirical;
  empirical.num_states = 3;
  empirical.num_actions = 2;
  empirical.discount = 0.9;
  empirical.reward_bound = 1.0;
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      empirical.reward.push_back(model.rhat(s, a));
      for (const double p : model.phat_row(s, a)) {
        empirical.transition.push_back(p);
      }
    }
  }
  const QTable q_hat = value_iteration(empirical, 1e-12).q;
  const QTable next = syncmbq_step(q_hat, model, 0.37, 0.9);
  CHECK(inf_norm_distance(next, q_hat) <= 1e-9);
}

TEST_CASE("syncmbq_step rejects mismatched shapes") {
  EmpiricalModel model(3, 2);
  CHECK_THROWS_AS(syncmbq_step(QTable::zeros(2, 2), model, 0.1, 0.9),
                  SizeMismatchError);
}

TEST_CASE("qlearning_step basics") {
  Transition t;
  t.state = 0;
  t.action = 0;
  t.next_state = 1;
  t.reward = 1.0;

  QTable q = QTable::zeros(2, 2);
  CHECK(inf_norm(qlearning_step(q, t, 0.0, 0.9)) == 0.0);  // null step

  const QTable updated = qlearning_step(q, t, 0.5, 0.9);
  CHECK(updated(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(updated(0, 1) == 0.0);
  CHECK(updated(1, 0) == 0.0);
}

TEST_CASE("qlearning_step suppresses the bootstrap on terminal steps") {
  QTable q = QTable::zeros(2, 2);
  q(1, 0) = 100.0;
  q(1, 1) = 100.0;
  Transition t;
  t.state = 0;
  t.action = 0;
  t.next_state = 1;
  t.reward = 1.0;
  t.terminal = true;
  const QTable updated = qlearning_step(q, t, 1.0, 0.9);
  CHECK(updated(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("qlearning_step rejects bad indices") {
  Transition t;
  t.state = 5;
  CHECK_THROWS_AS(qlearning_step(QTable::zeros(2, 2), t, 0.5, 0.9),
                  IndexError);
}

TEST_CASE("a budget equal to the warmup leaves the iterate frozen") {
  const TabularMdp mdp = random_mdp(4, 4, 2);
  TrainerConfig config = iid_config(120, 9, 16);
  config.warmup_steps = 120;
  config.q_init = 0.25;
  const RunTrace trace = run_training(mdp, config);
  for (const double v : trace.final_q.values) CHECK(v == 0.25);
  for (const auto& row : trace.rows) CHECK(row.q_max_abs == 0.25);
}

TEST_CASE("warmup of length m visits everything at the lemma rate") {
  // m = ceil(16 ln(2*16/0.1)) = 93 for the uniform distribution over a
  // 4x4 MDP; the lemma promises all pairs visited w.p. >= 1 - 0.05.
  const TabularMdp mdp = random_mdp(4, 4, 40);
  const long m = data_collection_length(1.0 / 16.0, 16, 0.1);
  CHECK(m == 93);
  long complete = 0;
  const long runs = 200;
  for (long i = 0; i < runs; ++i) {
    TrainerConfig config = iid_config(m, 7000 + i, 16);
    config.warmup_steps = m;
    config.log_stride = m;
    const RunTrace trace = run_training(mdp, config);
    if (trace.visited_all_step >= 0) ++complete;
  }
  CHECK(static_cast<double>(complete) / runs >= 0.95);
}

TEST_CASE("error decreases after visitation on a random MDP") {
  const TabularMdp mdp = random_mdp(4, 4, 7);
  const QTable oracle = value_iteration(mdp, 1e-10).q;
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 7; ++seed) {
    TrainerConfig config = iid_config(10000, seed, 16);
    config.log_stride = 1;
    const RunTrace trace = run_training(mdp, config, &oracle);
    REQUIRE(trace.visited_all_step > 0);
    const auto& at_visitation =
        trace.rows[static_cast<std::size_t>(trace.visited_all_step - 1)];
    if (trace.rows.back().inf_error < at_visitation.inf_error) ++improved;
  }
  CHECK(improved >= 6);
}

TEST_CASE("training runs are deterministic in config and seed") {
  const TabularMdp mdp = random_mdp(4, 4, 3);
  TrainerConfig config = iid_config(2000, 77, 16);
  config.log_stride = 100;
  const RunTrace a = run_training(mdp, config);
  const RunTrace b = run_training(mdp, config);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].q_max_abs == b.rows[i].q_max_abs);
  }
  CHECK(a.final_q.values == b.final_q.values);
  CHECK(a.visited_all_step == b.visited_all_step);
}

TEST_CASE("episodic runs are deterministic and respect the iterate bound") {
  const auto env = frozenlake8x8();
  TrainerConfig config;
  config.step_size = 0.1;
  config.discount = 0.9;
  config.total_episodes = 80;
  config.max_episode_len = 400;
  config.sampler = SamplerSpec::epsilon_greedy(0.1, 3);
  config.log_stride = 1;
  const RunTrace a = run_training(*env, config);
  const RunTrace b = run_training(*env, config);
  CHECK(a.final_q.values == b.final_q.values);
  CHECK(a.total_env_steps == b.total_env_steps);
  REQUIRE(a.rows.size() == 80);
  for (const auto& row : a.rows) {
    CHECK(row.q_max_abs <= 1.0 / (1.0 - 0.9) + 1e-9);
  }
}

TEST_CASE("episodic qlearning run stays within the scale bound") {
  const auto env = taxi();
  TrainerConfig config;
  config.algorithm = Algorithm::qlearning;
  config.step_size = 0.5;
  config.discount = 0.9;
  config.total_episodes = 50;
  config.max_episode_len = 200;
  config.sampler = SamplerSpec::epsilon_greedy(0.1, 5);
  config.log_stride = 10;
  const RunTrace trace = run_training(*env, config);
  for (const auto& row : trace.rows) {
    CHECK(row.q_max_abs <= 20.0 / (1.0 - 0.9) + 1e-9);
  }
}

TEST_CASE("mode mismatches are rejected") {
  const TabularMdp mdp = random_mdp(3, 2, 1);
  TrainerConfig config = iid_config(10, 0, 6);
  config.sampler = SamplerSpec::epsilon_greedy(0.1, 0);
  CHECK_THROWS_AS(run_training(mdp, config), ModeError);

  const auto env = frozenlake8x8();
  TrainerConfig episodic;
  episodic.total_episodes = 5;
  episodic.sampler = SamplerSpec::iid_uniform(256, 0);
  CHECK_THROWS_AS(run_training(*env, episodic), ModeError);
}

TEST_CASE("config validation rejects bad ranges") {
  TrainerConfig config = iid_config(10, 0, 6);
  config.step_size = 1.0;
  CHECK_THROWS_AS(validate_config(config, false), ValidationError);
  config.step_size = 0.1;
  config.total_steps = 0;
  CHECK_THROWS_AS(validate_config(config, false), ValidationError);
  config.total_steps = 10;
  config.log_stride = 0;
  CHECK_THROWS_AS(validate_config(config, false), ValidationError);
}

TEST_CASE("the taxi oracle policy succeeds everywhere under evaluation") {
  const auto env = taxi();
  const QTable q_star = value_iteration(env->mdp_view(0.9), 1e-9).q;
  const double rate = evaluate_greedy(*env, q_star, 600, 200, 13);
  CHECK(rate == 1.0);
}

TEST_CASE("evaluating the zero table equals the constant-action rollout") {
  const auto env = frozenlake8x8();
  const QTable q = QTable::zeros(64, 4);
  const long episodes = 400;
  const long max_len = 400;
  const std::uint64_t seed = 99;
  // Independent rollout with the tie-break-constant policy (action 0).
  Rng rng(seed);
  long successes = 0;
  for (long e = 0; e < episodes; ++e) {
    int state = env->reset(rng);
    for (long step = 0; step < max_len; ++step) {
      const StepResult r = env->step(state, 0, rng);
      if (r.terminal) {
        if (r.reward > 0.0) ++successes;
        break;
      }
      state = r.next_state;
    }
  }
  const double expected = static_cast<double>(successes) / episodes;
  CHECK(evaluate_greedy(*env, q, episodes, max_len, seed) == expected);
}

TEST_CASE("evaluate_greedy rejects an empty evaluation") {
  const auto env = frozenlake8x8();
  CHECK_THROWS_AS(evaluate_greedy(*env, QTable::zeros(64, 4), 0, 100, 1),
                  RangeError);
}
