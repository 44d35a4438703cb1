#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "mbq/environments.hpp"
#include "mbq/mdp.hpp"

using namespace mbq;

TEST_CASE("random_mdp produces a valid seeded MDP") {
  const TabularMdp mdp = random_mdp(4, 4, 7);
  CHECK(mdp.num_states == 4);
  CHECK(mdp.num_actions == 4);
  CHECK_NOTHROW(validate_mdp(mdp));
  for (const double r : mdp.reward) {
    CHECK(std::abs(r) <= 1.0);
  }
}

TEST_CASE("random_mdp is deterministic in the seed") {
  const TabularMdp a = random_mdp(4, 4, 7);
  const TabularMdp b = random_mdp(4, 4, 7);
  CHECK(a.transition == b.transition);
  CHECK(a.reward == b.reward);
  const TabularMdp c = random_mdp(4, 4, 8);
  CHECK(a.transition != c.transition);
}

TEST_CASE("random_mdp makes the last state absorbing with zero reward") {
  const TabularMdp mdp = random_mdp(5, 3, 123);
  const int terminal = 4;
  for (int a = 0; a < 3; ++a) {
    for (int next = 0; next < 5; ++next) {
      CHECK(mdp.prob(terminal, a, next) == (next == terminal ? 1.0 : 0.0));
    }
    CHECK(mdp.reward[static_cast<std::size_t>(mdp.pair_index(terminal, a))] ==
          0.0);
  }
}

TEST_CASE("random_mdp rejects invalid dimensions") {
  CHECK_THROWS_AS(random_mdp(1, 1, 0), ValidationError);
  CHECK_THROWS_AS(random_mdp(4, 0, 0), ValidationError);
}

TEST_CASE("frozenlake has the contracted shape and map") {
  const auto env = frozenlake8x8();
  CHECK(env->num_states() == 64);
  CHECK(env->num_actions() == 4);
  CHECK(env->reward_bound() == 1.0);
  const auto& map = frozenlake8x8_map();
  CHECK(map[0] == "SFFFFFFF");
  CHECK(map[7] == "FFFHFFFG");
  Rng rng(0);
  CHECK(env->reset(rng) == 0);
}

TEST_CASE("frozenlake view is a valid MDP with thirds-valued rows") {
  const auto env = frozenlake8x8();
  const TabularMdp view = env->mdp_view(0.9);
  CHECK_NOTHROW(validate_mdp(view));
  for (int s = 0; s < view.num_states; ++s) {
    for (int a = 0; a < view.num_actions; ++a) {
      int support = 0;
      for (int next = 0; next < view.num_states; ++next) {
        const double p = view.prob(s, a, next);
        const bool is_third =
            p == 0.0 || p == 1.0 / 3.0 || p == 2.0 / 3.0 || p == 1.0;
        CHECK(is_third);
        if (p > 0.0) ++support;
      }
      CHECK(support <= 3);
    }
  }
}

TEST_CASE("frozenlake reaches the goal from next door with probability 1/3") {
  const auto env = frozenlake8x8();
  const int beside_goal = 7 * 8 + 6;
  const int goal = 63;
  Rng rng(42);
  const long n = 100000;
  long hits = 0;
  for (long i = 0; i < n; ++i) {
    const StepResult r = env->step(beside_goal, /*right=*/2, rng);
    if (r.next_state == goal) {
      ++hits;
      CHECK(r.reward == 1.0);
      CHECK(r.terminal);
    }
  }
  const double p = 1.0 / 3.0;
  const double tolerance = 4.0 * std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(hits) / n - p) <= tolerance);
}

TEST_CASE("frozenlake episodes pay at most one unit") {
  const auto env = frozenlake8x8();
  Rng rng(5);
  for (int episode = 0; episode < 200; ++episode) {
    int state = env->reset(rng);
    double total = 0.0;
    for (int step = 0; step < 2000; ++step) {
      const StepResult r = env->step(state, rng.uniform_int(4), rng);
      total += r.reward;
      if (r.terminal) break;
      state = r.next_state;
    }
    CHECK((total == 0.0 || total == 1.0));
  }
}

TEST_CASE("episodic step frequencies match the MDP view") {
  const auto env = frozenlake8x8();
  const TabularMdp view = env->mdp_view(0.9);
  Rng rng(77);
  const long n = 100000;
  // A mid-board state with three distinct outcomes.
  const int state = 3 * 8 + 1;
  const int action = 1;  // down
  std::vector<long> counts(64, 0);
  for (long i = 0; i < n; ++i) {
    ++counts[static_cast<std::size_t>(env->step(state, action, rng).next_state)];
  }
  for (int next = 0; next < 64; ++next) {
    const double p = view.prob(state, action, next);
    const double freq = static_cast<double>(counts[static_cast<std::size_t>(
                            next)]) / n;
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
    CHECK(std::abs(freq - p) <= 4.0 * se + 1e-9);
  }
}

TEST_CASE("taxi has the contracted shape and deterministic dynamics") {
  const auto env = taxi();
  CHECK(env->num_states() == 500);
  CHECK(env->num_actions() == 6);
  CHECK(env->reward_bound() == 20.0);
  const TabularMdp view = env->mdp_view(0.9);
  CHECK_NOTHROW(validate_mdp(view));
  for (int s = 0; s < view.num_states; ++s) {
    for (int a = 0; a < view.num_actions; ++a) {
      int support = 0;
      for (int next = 0; next < view.num_states; ++next) {
        if (view.prob(s, a, next) > 0.0) ++support;
      }
      CHECK(support == 1);
    }
  }
}

TEST_CASE("taxi resets cover exactly the 300 legal starts") {
  const auto env = taxi();
  Rng rng(9);
  std::set<int> seen;
  for (int i = 0; i < 20000; ++i) {
    const int state = env->reset(rng);
    seen.insert(state);
    const int dest = state % 4;
    const int pass = (state / 4) % 5;
    CHECK(pass < 4);
    CHECK(pass != dest);
  }
  CHECK(seen.size() == 300);
}

TEST_CASE("taxi punishes illegal pick-drop with -10 and stays alive") {
  const auto env = taxi();
  Rng rng(1);
  // Taxi at (2,2), passenger waiting at depot 0, destination 1: neither
  // pickup nor dropoff is legal here.
  const int state = ((2 * 5 + 2) * 5 + 0) * 4 + 1;
  const StepResult drop = env->step(state, 5, rng);
  CHECK(drop.reward == -10.0);
  CHECK_FALSE(drop.terminal);
  CHECK(drop.next_state == state);
  const StepResult pick = env->step(state, 4, rng);
  CHECK(pick.reward == -10.0);
  CHECK_FALSE(pick.terminal);
}

TEST_CASE("taxi rewards a successful dropoff with +20 and terminates") {
  const auto env = taxi();
  Rng rng(1);
  // Taxi at depot 1 = (0,4) with the passenger aboard, destination 1.
  const int state = ((0 * 5 + 4) * 5 + 4) * 4 + 1;
  const StepResult r = env->step(state, 5, rng);
  CHECK(r.reward == 20.0);
  CHECK(r.terminal);
}

TEST_CASE("taxi movement costs -1 and respects walls") {
  const auto env = taxi();
  Rng rng(1);
  // Taxi at (0,1), wall to the east.
  const int blocked = ((0 * 5 + 1) * 5 + 0) * 4 + 1;
  const StepResult east = env->step(blocked, 2, rng);
  CHECK(east.reward == -1.0);
  CHECK(east.next_state == blocked);  // bumped the wall
  const StepResult south = env->step(blocked, 0, rng);
  CHECK(south.next_state == ((1 * 5 + 1) * 5 + 0) * 4 + 1);
}

TEST_CASE("taxi greedy oracle rollouts succeed from every legal start") {
  const auto env = taxi();
  const TabularMdp view = env->mdp_view(0.9);
  const QTable q_star = value_iteration(view, 1e-9).q;
  const GreedyPolicy policy = greedy_policy(q_star);
  Rng rng(0);
  std::set<int> starts;
  while (starts.size() < 300) starts.insert(env->reset(rng));
  for (const int start : starts) {
    int state = start;
    double total = 0.0;
    bool succeeded = false;
    for (int step = 0; step < 30; ++step) {
      const StepResult r =
          env->step(state, policy.action[static_cast<std::size_t>(state)], rng);
      total += r.reward;
      if (r.terminal) {
        succeeded = r.reward == 20.0;
        break;
      }
      state = r.next_state;
    }
    CHECK(succeeded);
    CHECK(total > 0.0);  // 20 minus at most 18 movement steps
  }
}

TEST_CASE("iid sampling matches the target distribution") {
  const TabularMdp mdp = random_mdp(4, 4, 3);
  IidSampler sampler(SamplerSpec::iid_uniform(16, 17), mdp);
  const long n = 100000;
  std::vector<long> counts(16, 0);
  for (long i = 0; i < n; ++i) {
    const Transition t = sampler.next();
    ++counts[static_cast<std::size_t>(t.state * 4 + t.action)];
    CHECK(t.reward ==
          mdp.reward[static_cast<std::size_t>(mdp.pair_index(t.state,
                                                             t.action))]);
  }
  const double p = 1.0 / 16.0;
  const double se = std::sqrt(p * (1.0 - p) / n);
  for (const long c : counts) {
    CHECK(std::abs(static_cast<double>(c) / n - p) <= 3.0 * se);
  }
}

TEST_CASE("a point-mass distribution always yields the same pair") {
  const TabularMdp mdp = random_mdp(3, 2, 5);
  std::vector<double> d(6, 0.0);
  d[2] = 1.0;  // (s=1, a=0)
  IidSampler sampler(SamplerSpec::iid(d, 1), mdp);
  for (int i = 0; i < 200; ++i) {
    const Transition t = sampler.next();
    CHECK(t.state == 1);
    CHECK(t.action == 0);
  }
}

TEST_CASE("iid streams replay under the same seed") {
  const TabularMdp mdp = random_mdp(4, 3, 11);
  IidSampler a(SamplerSpec::iid_uniform(12, 23), mdp);
  IidSampler b(SamplerSpec::iid_uniform(12, 23), mdp);
  for (int i = 0; i < 500; ++i) {
    const Transition x = a.next();
    const Transition y = b.next();
    CHECK(x.state == y.state);
    CHECK(x.action == y.action);
    CHECK(x.next_state == y.next_state);
    CHECK(x.reward == y.reward);
    CHECK(x.step_index == y.step_index);
  }
}

TEST_CASE("samplers reject wrong modes and invalid specs") {
  const TabularMdp mdp = random_mdp(3, 2, 1);
  CHECK_THROWS_AS(IidSampler(SamplerSpec::epsilon_greedy(0.1, 0), mdp),
                  ModeError);
  const auto env = frozenlake8x8();
  CHECK_THROWS_AS(EpisodicSampler(SamplerSpec::iid_uniform(256, 0), *env),
                  ModeError);

  std::vector<double> short_d(5, 0.2);
  CHECK_THROWS_AS(validate_sampler(SamplerSpec::iid(short_d, 0), 6),
                  SizeMismatchError);
  std::vector<double> low_d(6, 0.15);  // sums to 0.9
  CHECK_THROWS_AS(validate_sampler(SamplerSpec::iid(low_d, 0), 6),
                  ValidationError);
  CHECK_THROWS_AS(validate_sampler(SamplerSpec::epsilon_greedy(1.5, 0), 6),
                  ValidationError);
  std::vector<double> with_zero = {0.5, 0.5, 0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(validate_sampler(SamplerSpec::iid(with_zero, 0), 6,
                                   /*require_positive=*/true),
                  ValidationError);
}

TEST_CASE("epsilon = 1 explores uniformly") {
  const auto env = frozenlake8x8();
  EpisodicSampler sampler(SamplerSpec::epsilon_greedy(1.0, 31), *env);
  const QTable q = QTable::zeros(64, 4);
  const long n = 100000;
  std::vector<long> counts(4, 0);
  for (long i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(
      sampler.next(q).action)];
  const double p = 0.25;
  const double se = std::sqrt(p * (1.0 - p) / n);
  for (const long c : counts) {
    CHECK(std::abs(static_cast<double>(c) / n - p) <= 4.0 * se);
  }
}

TEST_CASE("epsilon = 0 exploits the unique argmax") {
  const auto env = frozenlake8x8();
  EpisodicSampler sampler(SamplerSpec::epsilon_greedy(0.0, 31), *env);
  QTable q = QTable::zeros(64, 4);
  for (int s = 0; s < 64; ++s) q(s, 2) = 1.0;
  for (int i = 0; i < 2000; ++i) CHECK(sampler.next(q).action == 2);
}

TEST_CASE("epsilon = 0.1 picks the greedy arm with frequency 0.925") {
  const auto env = frozenlake8x8();
  EpisodicSampler sampler(SamplerSpec::epsilon_greedy(0.1, 101), *env);
  QTable q = QTable::zeros(64, 4);
  for (int s = 0; s < 64; ++s) q(s, 1) = 5.0;
  const long n = 100000;
  long greedy = 0;
  for (long i = 0; i < n; ++i) {
    if (sampler.next(q).action == 1) ++greedy;
  }
  const double expected = 1.0 - 0.1 + 0.1 / 4.0;  // 0.925
  const double se = std::sqrt(expected * (1.0 - expected) / n);
  CHECK(std::abs(static_cast<double>(greedy) / n - expected) <= 4.0 * se);
}

TEST_CASE("episodic streams replay under the same seed") {
  const auto env = taxi();
  EpisodicSampler a(SamplerSpec::epsilon_greedy(0.3, 55), *env);
  EpisodicSampler b(SamplerSpec::epsilon_greedy(0.3, 55), *env);
  const QTable q = QTable::zeros(500, 6);
  for (int i = 0; i < 2000; ++i) {
    const Transition x = a.next(q);
    const Transition y = b.next(q);
    CHECK(x.state == y.state);
    CHECK(x.action == y.action);
    CHECK(x.next_state == y.next_state);
    CHECK(x.reward == y.reward);
    CHECK(x.terminal == y.terminal);
  }
}
