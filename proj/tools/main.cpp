#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mbq/errors.hpp"
#include "run_file.hpp"

namespace {

// Exit contract: 0 ok, 2 config/validation, 3 bound validity,
// 4 soundness violation.
constexpr int kConfigError = 2;
constexpr int kValidityError = 3;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t position = 0;
  while (position < text.size()) {
    const std::size_t comma = text.find(',', position);
    const std::string token =
        text.substr(position, comma == std::string::npos ? std::string::npos
                                                         : comma - position);
    if (!token.empty()) seeds.push_back(std::stoull(token));
    if (comma == std::string::npos) break;
    position = comma + 1;
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular model-based Q-learning laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::string seeds_override;
  int threads = 1;
  bool json_output = false;

  // solve
  auto* solve = app.add_subcommand("solve", "Value-iterate an MDP file and "
                                            "write its optimal Q-table");
  std::string solve_mdp;
  std::string solve_out = "qstar.json";
  double solve_tolerance = 1e-10;
  solve->add_option("mdp", solve_mdp, "MDP JSON document")->required();
  solve->add_option("--out", solve_out, "output Q-table path");
  solve->add_option("--tolerance", solve_tolerance,
                    "certified ||Q - Q*||_inf bound");
  solve->add_flag("--json", json_output, "machine-readable output");

  // train
  auto* train = app.add_subcommand(
      "train", "Run the configured algorithm across seeds, writing trace and "
               "summary CSVs");
  train->add_option("--config", config_path, "run file (JSON)")->required();
  train->add_option("--out", out_override, "override output_dir");
  train->add_option("--seeds", seeds_override, "override seed list, e.g. 1,2,3");
  train->add_option("--threads", threads, "seed fan-out width");

  // compare
  auto* compare = app.add_subcommand(
      "compare", "Co-evolve SyncMBQ with its comparison systems on a "
                 "ground-truth MDP");
  compare->add_option("--config", config_path, "run file (JSON)")->required();
  compare->add_option("--out", out_override, "override output_dir");
  compare->add_option("--seeds", seeds_override, "override seed list");
  compare->add_option("--threads", threads, "seed fan-out width");

  // bound
  auto* bound = app.add_subcommand(
      "bound", "Evaluate the sample-complexity certificate");
  mbq::BoundInputs bound_inputs;
  std::string bound_out;
  bound->add_option("--epsilon", bound_inputs.epsilon, "target accuracy")
      ->required();
  bound->add_option("--delta", bound_inputs.delta, "failure probability")
      ->required();
  bound->add_option("--gamma", bound_inputs.gamma, "discount")->required();
  bound->add_option("--alpha", bound_inputs.alpha, "step size")->required();
  bound->add_option("--dmin", bound_inputs.d_min, "minimum sampling mass")
      ->required();
  bound->add_option("--pairs", bound_inputs.num_pairs, "|S||A|")->required();
  bound->add_option("--out", bound_out, "also write the JSON report here");
  bound->add_flag("--json", json_output, "machine-readable output");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Monte Carlo check of the concentration bounds on a random "
                "MDP");
  mbq::cli::VerifyOptions verify_options;
  verify->add_option("--states", verify_options.num_states, "|S|");
  verify->add_option("--actions", verify_options.num_actions, "|A|");
  verify->add_option("--mdp-seed", verify_options.mdp_seed, "generator seed");
  verify->add_option("--gamma", verify_options.discount, "discount");
  verify->add_option("--k", verify_options.k, "steps per trial");
  verify->add_option("--trials", verify_options.trials, "Monte Carlo trials");
  verify->add_option("--seed", verify_options.seed, "trial seed");
  verify->add_option("--eps-w", verify_options.eps_w, "deviation for the w bound");
  verify->add_option("--eps-p", verify_options.eps_p, "deviation for the P bound");
  verify->add_option("--eps-r", verify_options.eps_r, "deviation for the R bound");
  verify->add_flag("--json", json_output, "machine-readable output");

  // eval
  auto* eval = app.add_subcommand(
      "eval", "Greedy success rate of a stored Q-table");
  mbq::cli::EvalOptions eval_options;
  eval->add_option("--env", eval_options.env_name,
                   "frozenlake8x8 or taxi")->required();
  eval->add_option("--q", eval_options.qtable_path, "Q-table JSON")
      ->required();
  eval->add_option("--episodes", eval_options.episodes, "evaluation episodes");
  eval->add_option("--max-episode-len", eval_options.max_episode_len,
                   "truncation length");
  eval->add_option("--seed", eval_options.seed, "evaluation seed");
  eval->add_flag("--json", json_output, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*solve) {
      return mbq::cli::cmd_solve(solve_mdp, solve_out, solve_tolerance,
                                 json_output);
    }
    if (*train || *compare) {
      mbq::cli::RunFile run = mbq::cli::load_run_file(config_path);
      if (!out_override.empty()) run.output_dir = out_override;
      if (!seeds_override.empty()) {
        run.seeds = parse_seed_list(seeds_override);
        if (run.seeds.empty()) {
          throw mbq::ValidationError("empty --seeds override");
        }
      }
      return *train ? mbq::cli::cmd_train(run, threads)
                    : mbq::cli::cmd_compare(run, threads);
    }
    if (*bound) {
      return mbq::cli::cmd_bound(bound_inputs, json_output, bound_out);
    }
    if (*verify) {
      verify_options.json_output = json_output;
      return mbq::cli::cmd_verify(verify_options);
    }
    if (*eval) {
      eval_options.json_output = json_output;
      return mbq::cli::cmd_eval(eval_options);
    }
  } catch (const mbq::EpsOutOfValidityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidityError;
  } catch (const mbq::SandwichViolationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const mbq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return 0;
}
