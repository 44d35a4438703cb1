#include "mbq/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mbq {

SamplerSpec SamplerSpec::iid_uniform(int pair_count, std::uint64_t seed) {
  SamplerSpec spec;
  spec.mode = SamplerMode::iid;
  spec.distribution.assign(static_cast<std::size_t>(pair_count),
                           1.0 / pair_count);
  spec.seed = seed;
  return spec;
}

SamplerSpec SamplerSpec::iid(std::vector<double> distribution,
                             std::uint64_t seed) {
  SamplerSpec spec;
  spec.mode = SamplerMode::iid;
  spec.distribution = std::move(distribution);
  spec.seed = seed;
  return spec;
}

SamplerSpec SamplerSpec::epsilon_greedy(double epsilon, std::uint64_t seed) {
  SamplerSpec spec;
  spec.mode = SamplerMode::epsilon_greedy;
  spec.epsilon = epsilon;
  spec.seed = seed;
  return spec;
}

void validate_sampler(const SamplerSpec& spec, int pair_count,
                      bool require_positive) {
  if (spec.mode == SamplerMode::iid) {
    if (spec.distribution.size() != static_cast<std::size_t>(pair_count)) {
      throw SizeMismatchError(
          "sampling distribution has " +
          std::to_string(spec.distribution.size()) + " entries, expected " +
          std::to_string(pair_count));
    }
    double sum = 0.0;
    double min_entry = 1.0;
    for (const double p : spec.distribution) {
      if (p < 0.0) {
        throw ValidationError("sampling distribution has a negative entry");
      }
      sum += p;
      min_entry = std::min(min_entry, p);
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ValidationError("sampling distribution sums to " +
                            std::to_string(sum) + ", expected 1");
    }
    if (require_positive && !(min_entry > 0.0)) {
      throw ValidationError("sampling distribution must have d_min > 0");
    }
  } else {
    if (!(spec.epsilon >= 0.0) || !(spec.epsilon <= 1.0)) {
      throw ValidationError("epsilon must lie in [0,1], got " +
                            std::to_string(spec.epsilon));
    }
  }
}

double min_mass(const std::vector<double>& distribution) {
  if (distribution.empty()) return 0.0;
  return *std::min_element(distribution.begin(), distribution.end());
}

TabularMdp random_mdp(int num_states, int num_actions, std::uint64_t seed,
                      double discount) {
  if (num_states < 2 || num_actions < 1) {
    throw ValidationError(
        "InvalidDimensions: random_mdp needs num_states >= 2 and "
        "num_actions >= 1");
  }
  Rng rng(seed);
  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.discount = discount;
  mdp.reward_bound = 1.0;
  mdp.reward.assign(static_cast<std::size_t>(num_states) * num_actions, 0.0);
  mdp.transition.assign(
      static_cast<std::size_t>(num_states) * num_actions * num_states, 0.0);

  const int terminal = num_states - 1;
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      const std::size_t base =
          static_cast<std::size_t>(mdp.pair_index(s, a)) * num_states;
      if (s == terminal) {
        mdp.transition[base + static_cast<std::size_t>(terminal)] = 1.0;
        continue;
      }
      double total = 0.0;
      for (int next = 0; next < num_states; ++next) {
        const double mass = 1.0 - rng.uniform();  // (0, 1]
        mdp.transition[base + static_cast<std::size_t>(next)] = mass;
        total += mass;
      }
      for (int next = 0; next < num_states; ++next) {
        mdp.transition[base + static_cast<std::size_t>(next)] /= total;
      }
      mdp.reward[static_cast<std::size_t>(mdp.pair_index(s, a))] =
          rng.uniform(-1.0, 1.0);
    }
  }
  return mdp;
}

// --- FrozenLake 8x8 ---------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 8> kFrozenLakeMap = {
    "SFFFFFFF", "FFFFFFFF", "FFFHFFFF", "FFFFFHFF",
    "FFFHFFFF", "FHHFFFHF", "FHFFHFHF", "FFFHFFFG"};

class FrozenLakeEnv final : public EpisodicEnv {
 public:
  static constexpr int kSize = 8;
  static constexpr int kStates = kSize * kSize;
  static constexpr int kActions = 4;  // left, down, right, up

  std::string_view name() const override { return "frozenlake8x8"; }
  int num_states() const override { return kStates; }
  int num_actions() const override { return kActions; }
  double reward_bound() const override { return 1.0; }

  int reset(Rng&) const override { return 0; }

  StepResult step(int state, int action, Rng& rng) const override {
    if (is_terminal(state)) return {state, 0.0, true};
    // Slip: intended direction or either perpendicular, each w.p. 1/3.
    const int slip = rng.uniform_int(3);
    const int direction = (action + slip - 1 + kActions) % kActions;
    const int next = move(state, direction);
    return outcome(next);
  }

  TabularMdp mdp_view(double discount) const override {
    TabularMdp mdp;
    mdp.num_states = kStates;
    mdp.num_actions = kActions;
    mdp.discount = discount;
    mdp.reward_bound = 1.0;
    mdp.reward.assign(kStates * kActions, 0.0);
    mdp.transition.assign(kStates * kActions * kStates, 0.0);
    for (int s = 0; s < kStates; ++s) {
      for (int a = 0; a < kActions; ++a) {
        const std::size_t base =
            static_cast<std::size_t>(mdp.pair_index(s, a)) * kStates;
        if (is_terminal(s)) {
          mdp.transition[base + static_cast<std::size_t>(s)] = 1.0;
          continue;
        }
        std::array<int, kStates> counts{};
        for (int slip = 0; slip < 3; ++slip) {
          const int direction = (a + slip - 1 + kActions) % kActions;
          ++counts[static_cast<std::size_t>(move(s, direction))];
        }
        double expected_reward = 0.0;
        for (int next = 0; next < kStates; ++next) {
          if (counts[static_cast<std::size_t>(next)] == 0) continue;
          const double p = counts[static_cast<std::size_t>(next)] / 3.0;
          mdp.transition[base + static_cast<std::size_t>(next)] = p;
          if (cell(next) == 'G') expected_reward += p;
        }
        mdp.reward[static_cast<std::size_t>(mdp.pair_index(s, a))] =
            expected_reward;
      }
    }
    return mdp;
  }

 private:
  static char cell(int state) {
    return kFrozenLakeMap[static_cast<std::size_t>(state / kSize)]
                         [static_cast<std::size_t>(state % kSize)];
  }
  static bool is_terminal(int state) {
    const char c = cell(state);
    return c == 'H' || c == 'G';
  }
  static int move(int state, int direction) {
    int row = state / kSize;
    int col = state % kSize;
    switch (direction) {
      case 0: col = std::max(col - 1, 0); break;          // left
      case 1: row = std::min(row + 1, kSize - 1); break;  // down
      case 2: col = std::min(col + 1, kSize - 1); break;  // right
      default: row = std::max(row - 1, 0); break;         // up
    }
    return row * kSize + col;
  }
  static StepResult outcome(int next) {
    const char c = cell(next);
    return {next, c == 'G' ? 1.0 : 0.0, c == 'G' || c == 'H'};
  }
};

}  // namespace

const std::array<std::string_view, 8>& frozenlake8x8_map() {
  return kFrozenLakeMap;
}

std::unique_ptr<EpisodicEnv> frozenlake8x8() {
  return std::make_unique<FrozenLakeEnv>();
}

// --- Taxi -------------------------------------------------------------------

namespace {

class TaxiEnv final : public EpisodicEnv {
 public:
  static constexpr int kGrid = 5;
  static constexpr int kStates = 500;
  static constexpr int kActions = 6;  // south, north, east, west, pickup, dropoff
  static constexpr int kInTaxi = 4;

  TaxiEnv() {
    for (int cell = 0; cell < kGrid * kGrid; ++cell) {
      for (int pass = 0; pass < 4; ++pass) {
        for (int dest = 0; dest < 4; ++dest) {
          if (pass == dest) continue;
          start_states_.push_back(encode(cell / kGrid, cell % kGrid, pass,
                                         dest));
        }
      }
    }
  }

  std::string_view name() const override { return "taxi"; }
  int num_states() const override { return kStates; }
  int num_actions() const override { return kActions; }
  double reward_bound() const override { return 20.0; }

  int reset(Rng& rng) const override {
    return start_states_[static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(start_states_.size())))];
  }

  StepResult step(int state, int action, Rng&) const override {
    return transition(state, action);
  }

  TabularMdp mdp_view(double discount) const override {
    TabularMdp mdp;
    mdp.num_states = kStates;
    mdp.num_actions = kActions;
    mdp.discount = discount;
    mdp.reward_bound = 20.0;
    mdp.reward.assign(kStates * kActions, 0.0);
    mdp.transition.assign(
        static_cast<std::size_t>(kStates) * kActions * kStates, 0.0);
    for (int s = 0; s < kStates; ++s) {
      for (int a = 0; a < kActions; ++a) {
        const std::size_t base =
            static_cast<std::size_t>(mdp.pair_index(s, a)) * kStates;
        if (is_delivered(s)) {
          mdp.transition[base + static_cast<std::size_t>(s)] = 1.0;
          continue;
        }
        const StepResult r = transition(s, a);
        mdp.transition[base + static_cast<std::size_t>(r.next_state)] = 1.0;
        mdp.reward[static_cast<std::size_t>(mdp.pair_index(s, a))] = r.reward;
      }
    }
    return mdp;
  }

 private:
  static constexpr std::array<std::pair<int, int>, 4> kDepots = {
      {{0, 0}, {0, 4}, {4, 0}, {4, 3}}};  // R, G, Y, B

  static int encode(int row, int col, int pass, int dest) {
    return ((row * kGrid + col) * 5 + pass) * 4 + dest;
  }
  static void decode(int state, int& row, int& col, int& pass, int& dest) {
    dest = state % 4;
    state /= 4;
    pass = state % 5;
    state /= 5;
    col = state % kGrid;
    row = state / kGrid;
  }
  // Delivered passenger: only reachable through a successful dropoff.
  static bool is_delivered(int state) {
    int row, col, pass, dest;
    decode(state, row, col, pass, dest);
    return pass == dest;
  }
  static bool east_blocked(int row, int col) {
    if (col >= kGrid - 1) return true;
    if ((row == 0 || row == 1) && col == 1) return true;
    if ((row == 3 || row == 4) && (col == 0 || col == 2)) return true;
    return false;
  }
  static int depot_at(int row, int col) {
    for (int i = 0; i < 4; ++i) {
      if (kDepots[static_cast<std::size_t>(i)] == std::make_pair(row, col))
        return i;
    }
    return -1;
  }

  static StepResult transition(int state, int action) {
    int row, col, pass, dest;
    decode(state, row, col, pass, dest);
    double reward = -1.0;
    bool terminal = false;
    switch (action) {
      case 0: row = std::min(row + 1, kGrid - 1); break;  // south
      case 1: row = std::max(row - 1, 0); break;          // north
      case 2:                                             // east
        if (!east_blocked(row, col)) ++col;
        break;
      case 3:  // west
        if (col > 0 && !east_blocked(row, col - 1)) --col;
        break;
      case 4:  // pickup
        if (pass < kInTaxi &&
            kDepots[static_cast<std::size_t>(pass)] == std::make_pair(row, col)) {
          pass = kInTaxi;
        } else {
          reward = -10.0;
        }
        break;
      default: {  // dropoff
        const int here = depot_at(row, col);
        if (pass == kInTaxi && here == dest) {
          pass = dest;
          reward = 20.0;
          terminal = true;
        } else if (pass == kInTaxi && here >= 0) {
          pass = here;
        } else {
          reward = -10.0;
        }
        break;
      }
    }
    return {encode(row, col, pass, dest), reward, terminal};
  }

  std::vector<int> start_states_;
};

}  // namespace

std::unique_ptr<EpisodicEnv> taxi() { return std::make_unique<TaxiEnv>(); }

// --- Samplers ---------------------------------------------------------------

IidSampler::IidSampler(SamplerSpec spec, const TabularMdp& mdp)
    : spec_(std::move(spec)), mdp_(&mdp), rng_(spec_.seed) {
  if (spec_.mode != SamplerMode::iid) {
    throw ModeError("IidSampler requires an iid SamplerSpec");
  }
  validate_sampler(spec_, mdp.pair_count());
}

Transition IidSampler::next() {
  const int pair = rng_.categorical(spec_.distribution);
  const int state = pair / mdp_->num_actions;
  const int action = pair % mdp_->num_actions;
  const int next_state = rng_.categorical(mdp_->transition_row(state, action));
  Transition t;
  t.state = state;
  t.action = action;
  t.next_state = next_state;
  t.reward = mdp_->reward[static_cast<std::size_t>(pair)];
  t.terminal = false;
  t.step_index = ++step_;
  return t;
}

EpisodicSampler::EpisodicSampler(SamplerSpec spec, const EpisodicEnv& env)
    : spec_(std::move(spec)), env_(&env), rng_(spec_.seed) {
  if (spec_.mode != SamplerMode::epsilon_greedy) {
    throw ModeError("EpisodicSampler requires an epsilon_greedy SamplerSpec");
  }
  validate_sampler(spec_, env.num_states() * env.num_actions());
  state_ = env_->reset(rng_);
}

Transition EpisodicSampler::next(const QTable& q) {
  if (q.num_states != env_->num_states() ||
      q.num_actions != env_->num_actions()) {
    throw SizeMismatchError("q-table is not sized for the environment");
  }
  int action;
  if (rng_.uniform() < spec_.epsilon) {
    action = rng_.uniform_int(env_->num_actions());
  } else {
    // Behavior ties break uniformly at random; a fixed tie-break would
    // pin the zero-initialized policy to action 0 and starve
    // exploration in sparse-reward environments.
    double best = q(state_, 0);
    int tie_count = 1;
    for (int a = 1; a < q.num_actions; ++a) {
      if (q(state_, a) > best) {
        best = q(state_, a);
        tie_count = 1;
      } else if (q(state_, a) == best) {
        ++tie_count;
      }
    }
    int pick = tie_count > 1 ? rng_.uniform_int(tie_count) : 0;
    action = 0;
    for (int a = 0; a < q.num_actions; ++a) {
      if (q(state_, a) == best && pick-- == 0) {
        action = a;
        break;
      }
    }
  }
  const StepResult result = env_->step(state_, action, rng_);
  Transition t;
  t.state = state_;
  t.action = action;
  t.next_state = result.next_state;
  t.reward = result.reward;
  t.terminal = result.terminal;
  t.step_index = ++step_;
  state_ = result.terminal ? env_->reset(rng_) : result.next_state;
  return t;
}

void EpisodicSampler::reset_episode() { state_ = env_->reset(rng_); }

}  // namespace mbq
