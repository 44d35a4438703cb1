#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "mbq/diagnostics.hpp"
#include "mbq/serialization.hpp"

namespace mbq::cli {

using nlohmann::json;

namespace {

std::string iso8601_now() {
  const std::time_t now = std::time(nullptr);
  char buffer[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

std::string metadata_line(const std::string& command, const RunFile& run,
                          std::uint64_t seed) {
  return "mbq " + command + " generated=" + iso8601_now() +
         " rng=" + Rng::kGeneratorId + " config=" + config_digest(run) +
         " seed=" + std::to_string(seed);
}

// Deterministic seed fan-out: results are indexed by position, so the
// completion order never affects the artifacts.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& work) {
  threads = std::max(1, threads);
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  const std::size_t worker_count =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  for (std::size_t w = 0; w < worker_count; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count;
           i = next.fetch_add(1)) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
  long n = 0;
};

Stats summarize(const std::vector<double>& values) {
  Stats stats;
  stats.n = static_cast<long>(values.size());
  if (values.empty()) return stats;
  double sum = 0.0;
  for (const double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) {
      ss += (v - stats.mean) * (v - stats.mean);
    }
    stats.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return stats;
}

void write_trace_csv(const std::string& path, const std::string& metadata,
                     const RunTrace& trace) {
  CsvWriter writer(path);
  writer.comment(metadata);
  writer.row({"step", "inf_error", "episode_return", "all_visited",
              "q_max_abs"});
  for (const auto& row : trace.rows) {
    writer.row({CsvWriter::cell(row.step), CsvWriter::cell(row.inf_error),
                CsvWriter::cell(row.episode_return),
                CsvWriter::cell(row.all_visited),
                CsvWriter::cell(row.q_max_abs)});
  }
}

std::vector<double> trailing_moving_average(const std::vector<double>& series,
                                            long window) {
  std::vector<double> out(series.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    if (i >= static_cast<std::size_t>(window)) {
      acc -= series[i - static_cast<std::size_t>(window)];
      out[i] = acc / static_cast<double>(window);
    } else {
      out[i] = acc / static_cast<double>(i + 1);
    }
  }
  return out;
}

}  // namespace

int cmd_solve(const std::string& mdp_path, const std::string& out_path,
              double tolerance, bool json_output) {
  const TabularMdp mdp = load_mdp(mdp_path);
  validate_mdp(mdp);
  const ValueIterationResult result = value_iteration(mdp, tolerance);
  const double residual =
      inf_norm_distance(bellman_optimality(mdp, result.q), result.q);
  save_qtable(result.q, out_path);
  if (json_output) {
    json document;
    document["iterations"] = result.iterations;
    document["residual"] = residual;
    document["q_max_abs"] = inf_norm(result.q);
    document["output"] = out_path;
    std::cout << document.dump(2) << "\n";
  } else {
    std::cout << "solved " << mdp_path << " in " << result.iterations
              << " sweeps, residual " << format_double(residual)
              << ", wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_train(const RunFile& run, int threads) {
  const bool episodic = is_episodic_env(run.env_name);
  std::filesystem::create_directories(run.output_dir);

  std::unique_ptr<EpisodicEnv> env;
  TabularMdp mdp;
  if (episodic) {
    env = run.env_name == "taxi" ? taxi() : frozenlake8x8();
    mdp = env->mdp_view(run.discount);
  } else {
    mdp = random_mdp(run.env_num_states, run.env_num_actions, run.env_seed,
                     run.discount);
  }
  validate_mdp(mdp);
  const QTable oracle = value_iteration(mdp, 1e-10).q;

  struct SeedResult {
    std::uint64_t seed = 0;
    double success_rate = std::numeric_limits<double>::quiet_NaN();
    double final_inf_error = 0.0;
    double final_q_max_abs = 0.0;
    long visited_all_step = -1;
    long total_env_steps = 0;
  };
  std::vector<SeedResult> results(run.seeds.size());

  parallel_for(run.seeds.size(), threads, [&](std::size_t index) {
    const std::uint64_t seed = run.seeds[index];
    const TrainerConfig config = trainer_config(run, seed, mdp.pair_count());
    const RunTrace trace = episodic ? run_training(*env, config, &oracle)
                                    : run_training(mdp, config, &oracle);
    SeedResult& result = results[index];
    result.seed = seed;
    result.final_inf_error = inf_norm_distance(trace.final_q, oracle);
    result.final_q_max_abs = inf_norm(trace.final_q);
    result.visited_all_step = trace.visited_all_step;
    result.total_env_steps = trace.total_env_steps;
    if (episodic) {
      result.success_rate =
          evaluate_greedy(*env, trace.final_q, run.eval_episodes,
                          run.eval_max_episode_len,
                          Rng::derive_seed(seed, 0xe7a1));
    }
    const std::string stem =
        run.output_dir + "/trace_seed" + std::to_string(seed);
    write_trace_csv(stem + ".csv", metadata_line("train", run, seed), trace);
    if (run.checkpoint_model) {
      save_qtable(trace.final_q,
                  run.output_dir + "/q_seed" + std::to_string(seed) + ".json");
      if (trace.final_model) {
        save_model(*trace.final_model, run.output_dir + "/model_seed" +
                                           std::to_string(seed) + ".json");
      }
    }
  });

  {
    CsvWriter writer(run.output_dir + "/per_seed.csv");
    writer.comment(metadata_line("train", run, 0));
    writer.row({"seed", "success_rate", "final_inf_error", "final_q_max_abs",
                "visited_all_step", "total_env_steps"});
    for (const auto& r : results) {
      writer.row({CsvWriter::cell(static_cast<long>(r.seed)),
                  CsvWriter::cell(r.success_rate),
                  CsvWriter::cell(r.final_inf_error),
                  CsvWriter::cell(r.final_q_max_abs),
                  CsvWriter::cell(r.visited_all_step),
                  CsvWriter::cell(r.total_env_steps)});
    }
  }

  std::vector<double> errors;
  std::vector<double> successes;
  for (const auto& r : results) {
    errors.push_back(r.final_inf_error);
    if (episodic) successes.push_back(r.success_rate);
  }
  const Stats error_stats = summarize(errors);
  const Stats success_stats = summarize(successes);
  {
    CsvWriter writer(run.output_dir + "/summary.csv");
    writer.comment(metadata_line("train", run, 0));
    writer.row({"metric", "mean", "stddev", "n"});
    if (episodic) {
      writer.row({"success_rate", CsvWriter::cell(success_stats.mean),
                  CsvWriter::cell(success_stats.stddev),
                  CsvWriter::cell(success_stats.n)});
    }
    writer.row({"final_inf_error", CsvWriter::cell(error_stats.mean),
                CsvWriter::cell(error_stats.stddev),
                CsvWriter::cell(error_stats.n)});
  }

  if (episodic) {
    std::cout << run.env_name << " "
              << (run.algorithm == Algorithm::syncmbq ? "syncmbq"
                                                      : "qlearning")
              << " alpha=" << format_double(run.step_size)
              << ": success rate " << format_double(success_stats.mean * 100)
              << "% +- " << format_double(success_stats.stddev * 100)
              << " over " << success_stats.n << " seeds\n";
  }
  std::cout << "final ||Q - Q*||_inf " << format_double(error_stats.mean)
            << " +- " << format_double(error_stats.stddev) << " over "
            << error_stats.n << " seeds; artifacts in " << run.output_dir
            << "\n";
  return 0;
}

int cmd_compare(const RunFile& run, int threads) {
  if (is_episodic_env(run.env_name)) {
    throw ValidationError(
        "compare requires a ground-truth MDP environment (use \"random\")");
  }
  std::filesystem::create_directories(run.output_dir);
  const TabularMdp mdp = random_mdp(run.env_num_states, run.env_num_actions,
                                    run.env_seed, run.discount);

  std::vector<ComparisonTrace> traces(run.seeds.size());
  parallel_for(run.seeds.size(), threads, [&](std::size_t index) {
    const std::uint64_t seed = run.seeds[index];
    const TrainerConfig config = trainer_config(run, seed, mdp.pair_count());
    traces[index] = run_with_comparisons(mdp, config);
    CsvWriter writer(run.output_dir + "/comparison_seed" +
                     std::to_string(seed) + ".csv");
    writer.comment(metadata_line("compare", run, seed));
    writer.row({"step", "w_inf", "a_norm", "sandwich_ok", "up_err", "low_err",
                "main_err"});
    for (const auto& row : traces[index].rows) {
      writer.row({CsvWriter::cell(row.step), CsvWriter::cell(row.w_inf),
                  CsvWriter::cell(row.a_norm),
                  CsvWriter::cell(row.sandwich_ok),
                  CsvWriter::cell(row.up_err), CsvWriter::cell(row.low_err),
                  CsvWriter::cell(row.main_err)});
    }
  });

  // Joint error-curve table: per-seed errors plus trailing moving
  // averages over the logged rows.
  {
    CsvWriter writer(run.output_dir + "/error_curve.csv");
    writer.comment(metadata_line("compare", run, 0));
    std::vector<std::string> header = {"step"};
    for (const std::uint64_t seed : run.seeds) {
      header.push_back("err_s" + std::to_string(seed));
    }
    for (const std::uint64_t seed : run.seeds) {
      header.push_back("ma_s" + std::to_string(seed));
    }
    writer.row(header);

    const std::size_t rows = traces.front().rows.size();
    std::vector<std::vector<double>> averages(traces.size());
    for (std::size_t t = 0; t < traces.size(); ++t) {
      std::vector<double> series;
      series.reserve(rows);
      for (const auto& row : traces[t].rows) series.push_back(row.main_err);
      averages[t] =
          trailing_moving_average(series, run.moving_average_window);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<std::string> cells = {
          CsvWriter::cell(traces.front().rows[i].step)};
      for (const auto& trace : traces) {
        cells.push_back(CsvWriter::cell(trace.rows[i].main_err));
      }
      for (const auto& avg : averages) {
        cells.push_back(CsvWriter::cell(avg[i]));
      }
      writer.row(cells);
    }
  }

  {
    CsvWriter writer(run.output_dir + "/per_seed.csv");
    writer.comment(metadata_line("compare", run, 0));
    writer.row({"seed", "visited_all_step", "final_inf_error",
                "policy_match"});
    for (std::size_t i = 0; i < traces.size(); ++i) {
      writer.row({CsvWriter::cell(static_cast<long>(run.seeds[i])),
                  CsvWriter::cell(traces[i].visited_all_step),
                  CsvWriter::cell(traces[i].final_inf_error),
                  CsvWriter::cell(traces[i].final_policy_matches_oracle)});
    }
  }

  long matches = 0;
  for (const auto& trace : traces) {
    if (trace.final_policy_matches_oracle) ++matches;
  }
  std::cout << "compare: " << traces.size() << " runs, all sandwich checks "
            << "passed; greedy policy matches the oracle in " << matches
            << "/" << traces.size() << " seeds; artifacts in "
            << run.output_dir << "\n";
  return 0;
}

int cmd_bound(const BoundInputs& inputs, bool json_output,
              const std::string& out_path) {
  const BoundReport report = sample_complexity(inputs);
  const std::string document = bound_report_to_json(report);
  if (!out_path.empty()) write_text_file(out_path, document);
  if (json_output) {
    std::cout << document;
    return 0;
  }
  std::printf("m             %ld\n", report.m);
  std::printf("threshold_e1  %ld\n", report.threshold_e1);
  std::printf("threshold_e2  %ld\n", report.threshold_e2);
  std::printf("threshold_e3  %ld\n", report.threshold_e3);
  std::printf("k_star        %ld\n", report.k_star);
  std::printf("eps_valid     %s (eps_max %s)\n",
              report.eps_valid ? "true" : "false",
              format_double(report.eps_max).c_str());
  std::printf("eps_prime     %s\n", format_double(report.eps_prime).c_str());
  if (report.w_tail_valid) {
    std::printf("w_tail(k*)    %s (log %s)\n",
                format_double(report.w_tail.value).c_str(),
                format_double(report.w_tail.log_value).c_str());
  }
  return 0;
}

int cmd_verify(const VerifyOptions& options) {
  const TabularMdp mdp = random_mdp(options.num_states, options.num_actions,
                                    options.mdp_seed, options.discount);
  const std::vector<double> d(static_cast<std::size_t>(mdp.pair_count()),
                              1.0 / mdp.pair_count());

  struct Row {
    const char* name;
    double eps;
    TailCheck check;
  };
  std::vector<Row> rows;
  rows.push_back({"w", options.eps_w,
                  monte_carlo_w_tail(mdp, d, options.k, options.eps_w,
                                     options.trials, options.seed)});
  rows.push_back({"p", options.eps_p,
                  monte_carlo_p_tail(mdp, d, options.k, options.eps_p,
                                     options.trials,
                                     Rng::derive_seed(options.seed, 1))});
  rows.push_back({"r", options.eps_r,
                  monte_carlo_r_tail(mdp, d, options.k, options.eps_r,
                                     options.trials,
                                     Rng::derive_seed(options.seed, 2))});

  bool all_sound = true;
  if (options.json_output) {
    json document;
    for (const auto& row : rows) {
      document[row.name] = {{"k", options.k},
                            {"eps", row.eps},
                            {"trials", row.check.trials},
                            {"empirical_freq", row.check.empirical_freq},
                            {"analytic", row.check.analytic.value},
                            {"analytic_log", row.check.analytic.log_value},
                            {"vacuous", row.check.vacuous},
                            {"sound", row.check.sound}};
      all_sound = all_sound && row.check.sound;
    }
    std::cout << document.dump(2) << "\n";
  } else {
    for (const auto& row : rows) {
      std::printf(
          "%s: k=%ld eps=%s empirical=%s analytic=%s (log %s) vacuous=%d "
          "sound=%d\n",
          row.name, options.k, format_double(row.eps).c_str(),
          format_double(row.check.empirical_freq).c_str(),
          format_double(row.check.analytic.value).c_str(),
          format_double(row.check.analytic.log_value).c_str(),
          row.check.vacuous ? 1 : 0, row.check.sound ? 1 : 0);
      all_sound = all_sound && row.check.sound;
    }
  }
  if (!all_sound) {
    std::cerr << "soundness violation: an empirical tail exceeded its "
                 "analytic bound\n";
    return 4;
  }
  return 0;
}

int cmd_eval(const EvalOptions& options) {
  if (!is_episodic_env(options.env_name)) {
    throw ValidationError("eval requires an episodic environment "
                          "(frozenlake8x8 or taxi)");
  }
  const auto env = options.env_name == "taxi" ? taxi() : frozenlake8x8();
  const QTable q = load_qtable(options.qtable_path);
  const double rate = evaluate_greedy(*env, q, options.episodes,
                                      options.max_episode_len, options.seed);
  if (options.json_output) {
    json document;
    document["environment"] = options.env_name;
    document["episodes"] = options.episodes;
    document["success_rate"] = rate;
    std::cout << document.dump(2) << "\n";
  } else {
    std::cout << options.env_name << ": greedy success rate "
              << format_double(rate * 100) << "% over " << options.episodes
              << " episodes\n";
  }
  return 0;
}

}  // namespace mbq::cli
