#include "run_file.hpp"

#include <nlohmann/json.hpp>

#include "mbq/errors.hpp"
#include "mbq/serialization.hpp"

namespace mbq::cli {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& document, const char* name, T fallback) {
  if (!document.contains(name)) return fallback;
  try {
    return document.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad run-file field ") + name + ": " +
                          e.what());
  }
}

template <typename T>
T require(const json& document, const char* name) {
  if (!document.contains(name)) {
    throw ValidationError(std::string("run file is missing field: ") + name);
  }
  return get_or<T>(document, name, T{});
}

}  // namespace

bool is_episodic_env(const std::string& env_name) {
  return env_name == "frozenlake8x8" || env_name == "taxi";
}

RunFile parse_run_file(const std::string& text) {
  json document = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (document.is_discarded()) {
    throw ValidationError("run file is not valid JSON");
  }

  RunFile run;
  const json env = require<json>(document, "environment");
  run.env_name = require<std::string>(env, "name");
  if (run.env_name == "random") {
    run.env_num_states = get_or<int>(env, "num_states", 4);
    run.env_num_actions = get_or<int>(env, "num_actions", 4);
    run.env_seed = get_or<std::uint64_t>(env, "seed", 0);
  } else if (!is_episodic_env(run.env_name)) {
    throw ValidationError("unknown environment: " + run.env_name);
  }

  run.discount = get_or<double>(document, "discount", 0.9);
  const std::string algorithm =
      get_or<std::string>(document, "algorithm", "syncmbq");
  if (algorithm == "syncmbq") {
    run.algorithm = Algorithm::syncmbq;
  } else if (algorithm == "qlearning") {
    run.algorithm = Algorithm::qlearning;
  } else {
    throw ValidationError("unknown algorithm: " + algorithm);
  }

  run.step_size = require<double>(document, "step_size");
  run.warmup_steps = get_or<long>(document, "warmup_steps", 0);
  run.total_steps = get_or<long>(document, "total_steps", 0);
  run.total_episodes = get_or<long>(document, "total_episodes", 0);
  run.max_episode_len = get_or<long>(document, "max_episode_len", 0);
  run.q_init = get_or<double>(document, "q_init", 0.0);
  run.log_stride = get_or<long>(document, "log_stride", 1);

  if (document.contains("sampler")) {
    const json sampler = document.at("sampler");
    const std::string mode = require<std::string>(sampler, "mode");
    if (mode == "iid") {
      run.sampler_mode = SamplerMode::iid;
      if (sampler.contains("distribution") &&
          sampler.at("distribution").is_array()) {
        run.uniform_distribution = false;
        run.distribution =
            sampler.at("distribution").get<std::vector<double>>();
      }
    } else if (mode == "epsilon_greedy") {
      run.sampler_mode = SamplerMode::epsilon_greedy;
      run.epsilon = get_or<double>(sampler, "epsilon", 0.1);
    } else {
      throw ValidationError("unknown sampler mode: " + mode);
    }
  } else {
    run.sampler_mode = is_episodic_env(run.env_name)
                           ? SamplerMode::epsilon_greedy
                           : SamplerMode::iid;
  }

  run.seeds = require<std::vector<std::uint64_t>>(document, "seeds");
  if (run.seeds.empty()) {
    throw ValidationError("run file needs a non-empty seeds list");
  }

  if (document.contains("evaluation")) {
    const json eval = document.at("evaluation");
    run.eval_episodes = get_or<long>(eval, "episodes", 2000);
    run.eval_max_episode_len = get_or<long>(eval, "max_episode_len", 200);
  }
  run.output_dir = get_or<std::string>(document, "output_dir", "out");
  run.moving_average_window =
      get_or<long>(document, "moving_average_window", 1);
  if (run.moving_average_window < 1) {
    throw ValidationError("moving_average_window must be >= 1");
  }
  run.checkpoint_model = get_or<bool>(document, "checkpoint_model", false);

  if (is_episodic_env(run.env_name)) {
    if (run.sampler_mode != SamplerMode::epsilon_greedy) {
      throw ValidationError(run.env_name +
                            " training requires an epsilon_greedy sampler");
    }
    if (run.total_episodes <= 0) {
      throw ValidationError("episodic runs need total_episodes > 0");
    }
  } else {
    if (run.sampler_mode != SamplerMode::iid) {
      throw ValidationError("random-MDP training requires an iid sampler");
    }
    if (run.total_steps <= 0) {
      throw ValidationError("iid runs need total_steps > 0");
    }
  }
  return run;
}

RunFile load_run_file(const std::string& path) {
  return parse_run_file(read_text_file(path));
}

TrainerConfig trainer_config(const RunFile& run, std::uint64_t seed,
                             int pair_count) {
  TrainerConfig config;
  config.step_size = run.step_size;
  config.discount = run.discount;
  config.warmup_steps = run.warmup_steps;
  config.total_steps = run.total_steps;
  config.total_episodes = run.total_episodes;
  config.max_episode_len = run.max_episode_len;
  config.algorithm = run.algorithm;
  config.q_init = run.q_init;
  config.log_stride = run.log_stride;
  if (run.sampler_mode == SamplerMode::iid) {
    config.sampler = run.uniform_distribution
                         ? SamplerSpec::iid_uniform(pair_count, seed)
                         : SamplerSpec::iid(run.distribution, seed);
  } else {
    config.sampler = SamplerSpec::epsilon_greedy(run.epsilon, seed);
  }
  return config;
}

std::string config_digest(const RunFile& run) {
  json canonical;
  canonical["environment"] = {{"name", run.env_name},
                              {"num_states", run.env_num_states},
                              {"num_actions", run.env_num_actions},
                              {"seed", run.env_seed}};
  canonical["discount"] = run.discount;
  canonical["algorithm"] =
      run.algorithm == Algorithm::syncmbq ? "syncmbq" : "qlearning";
  canonical["step_size"] = run.step_size;
  canonical["warmup_steps"] = run.warmup_steps;
  canonical["total_steps"] = run.total_steps;
  canonical["total_episodes"] = run.total_episodes;
  canonical["max_episode_len"] = run.max_episode_len;
  canonical["mode"] = run.sampler_mode == SamplerMode::iid ? "iid" : "eg";
  canonical["epsilon"] = run.epsilon;
  canonical["distribution"] = run.distribution;
  canonical["q_init"] = run.q_init;
  canonical["log_stride"] = run.log_stride;
  canonical["eval_episodes"] = run.eval_episodes;
  canonical["eval_max_episode_len"] = run.eval_max_episode_len;
  const std::string text = canonical.dump();

  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace mbq::cli
