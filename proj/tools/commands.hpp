#pragma once

#include <cstdint>
#include <string>

#include "mbq/bounds.hpp"
#include "run_file.hpp"

namespace mbq::cli {

int cmd_solve(const std::string& mdp_path, const std::string& out_path,
              double tolerance, bool json_output);

int cmd_train(const RunFile& run, int threads);

int cmd_compare(const RunFile& run, int threads);

int cmd_bound(const BoundInputs& inputs, bool json_output,
              const std::string& out_path);

struct VerifyOptions {
  int num_states = 4;
  int num_actions = 4;
  std::uint64_t mdp_seed = 7;
  double discount = 0.9;
  long k = 60000;
  long trials = 200;
  std::uint64_t seed = 1;
  double eps_w = 2.0;
  double eps_p = 1.5;
  double eps_r = 1.5;
  bool json_output = false;
};

int cmd_verify(const VerifyOptions& options);

struct EvalOptions {
  std::string env_name;
  std::string qtable_path;
  long episodes = 2000;
  long max_episode_len = 200;
  std::uint64_t seed = 1;
  bool json_output = false;
};

int cmd_eval(const EvalOptions& options);

}  // namespace mbq::cli
