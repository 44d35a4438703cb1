#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "mbq/mdp.hpp"
#include "mbq/rng.hpp"

namespace mbq {

/// One observed step: (s, a, s', r), whether it ended an episode, and
/// its position in the sampling stream.
struct Transition {
  int state = 0;
  int action = 0;
  int next_state = 0;
  double reward = 0.0;
  bool terminal = false;
  long step_index = 0;
};

enum class SamplerMode { iid, epsilon_greedy };

/// How transitions are generated: either i.i.d. state-action draws from
/// a distribution d over (s, a) pairs, or epsilon-greedy rollouts in an
/// episodic environment.
struct SamplerSpec {
  SamplerMode mode = SamplerMode::iid;
  std::vector<double> distribution;  // over (s,a), iid mode only
  double epsilon = 0.0;              // epsilon-greedy mode only
  std::uint64_t seed = 0;

  static SamplerSpec iid_uniform(int pair_count, std::uint64_t seed);
  static SamplerSpec iid(std::vector<double> distribution, std::uint64_t seed);
  static SamplerSpec epsilon_greedy(double epsilon, std::uint64_t seed);
};

/// Validates the spec against a pair count; iid mode additionally
/// requires d to be a strictly positive distribution when
/// `require_positive` is set (the theory checks need d_min > 0).
void validate_sampler(const SamplerSpec& spec, int pair_count,
                      bool require_positive = false);

/// Smallest entry of the sampling distribution (d_min).
double min_mass(const std::vector<double>& distribution);

/// Seeded random MDP: rewards uniform in [-1, 1], transition rows drawn
/// by normalizing positive uniform draws.  State num_states-1 is an
/// absorbing terminal with zero reward; state 0 is the start.
TabularMdp random_mdp(int num_states, int num_actions, std::uint64_t seed,
                      double discount = 0.9);

struct StepResult {
  int next_state = 0;
  double reward = 0.0;
  bool terminal = false;
};

/// Episodic environment with pure dynamics: all randomness flows
/// through the caller-supplied Rng, so instances are immutable and
/// shareable across threads.  `mdp_view` exposes the exact transition
/// and expected-reward model for oracle computations.
class EpisodicEnv {
 public:
  virtual ~EpisodicEnv() = default;

  virtual std::string_view name() const = 0;
  virtual int num_states() const = 0;
  virtual int num_actions() const = 0;

  /// Largest absolute single-step reward the environment can emit.
  virtual double reward_bound() const = 0;

  virtual int reset(Rng& rng) const = 0;
  virtual StepResult step(int state, int action, Rng& rng) const = 0;

  virtual TabularMdp mdp_view(double discount) const = 0;
};

/// FrozenLake on the canonical 8x8 map: 64 states, 4 actions
/// (left/down/right/up).  Moves go in the intended direction with
/// probability 1/3 and in each perpendicular direction with probability
/// 1/3; bumping the border keeps the position.  Holes and the goal are
/// terminal; reaching the goal pays 1, everything else pays 0.
std::unique_ptr<EpisodicEnv> frozenlake8x8();

/// The 8x8 map is part of the public contract.
const std::array<std::string_view, 8>& frozenlake8x8_map();

/// Taxi on the standard 5x5 grid with 4 depots: 500 states, 6 actions
/// (south/north/east/west/pickup/dropoff).  Deterministic dynamics;
/// -1 per step, -10 for an illegal pickup/dropoff, +20 for delivering
/// the passenger (terminal).  Episodes start from one of the 300 states
/// with the passenger waiting at a depot that is not the destination.
std::unique_ptr<EpisodicEnv> taxi();

/// Draws (s,a) ~ d and s' ~ P(.|s,a); the reward comes from the MDP's
/// reward model.  Successive calls advance one deterministic stream.
class IidSampler {
 public:
  IidSampler(SamplerSpec spec, const TabularMdp& mdp);

  Transition next();

 private:
  SamplerSpec spec_;
  const TabularMdp* mdp_;
  Rng rng_;
  long step_ = 0;
};

/// Epsilon-greedy episodic sampler: owns the environment state machine
/// and its RNG stream.  Resets automatically after terminal steps;
/// `reset_episode` forces a reset on truncation.
class EpisodicSampler {
 public:
  EpisodicSampler(SamplerSpec spec, const EpisodicEnv& env);

  Transition next(const QTable& q);
  void reset_episode();
  int current_state() const { return state_; }

 private:
  SamplerSpec spec_;
  const EpisodicEnv* env_;
  Rng rng_;
  int state_ = 0;
  long step_ = 0;
};

}  // namespace mbq
