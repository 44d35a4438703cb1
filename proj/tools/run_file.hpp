#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbq/learner.hpp"

namespace mbq::cli {

/// Parsed experiment description.  One run file drives one
/// (environment, algorithm, step size) cell across a list of seeds.
struct RunFile {
  // environment
  std::string env_name;  // "random" | "frozenlake8x8" | "taxi"
  int env_num_states = 4;
  int env_num_actions = 4;
  std::uint64_t env_seed = 0;
  double discount = 0.9;

  // trainer
  Algorithm algorithm = Algorithm::syncmbq;
  double step_size = 0.1;
  long warmup_steps = 0;
  long total_steps = 0;
  long total_episodes = 0;
  long max_episode_len = 0;
  SamplerMode sampler_mode = SamplerMode::iid;
  double epsilon = 0.1;
  bool uniform_distribution = true;
  std::vector<double> distribution;  // explicit d, iid mode only
  double q_init = 0.0;
  long log_stride = 1;

  // experiment
  std::vector<std::uint64_t> seeds;
  long eval_episodes = 2000;
  long eval_max_episode_len = 200;
  std::string output_dir = "out";
  long moving_average_window = 1;
  bool checkpoint_model = false;
};

RunFile parse_run_file(const std::string& text);
RunFile load_run_file(const std::string& path);

/// Trainer settings for one seed of this run file.
TrainerConfig trainer_config(const RunFile& run, std::uint64_t seed,
                             int pair_count);

bool is_episodic_env(const std::string& env_name);

/// FNV-1a digest of the canonical run description, recorded in CSV
/// metadata so artifacts can be traced back to their configuration.
std::string config_digest(const RunFile& run);

}  // namespace mbq::cli
