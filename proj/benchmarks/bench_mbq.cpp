#include <benchmark/benchmark.h>

#include "mbq/diagnostics.hpp"
#include "mbq/environments.hpp"
#include "mbq/learner.hpp"

using namespace mbq;

namespace {

EmpiricalModel sampled_model(const TabularMdp& mdp, long steps) {
  EmpiricalModel model(mdp.num_states, mdp.num_actions);
  IidSampler sampler(SamplerSpec::iid_uniform(mdp.pair_count(), 1), mdp);
  for (long i = 0; i < steps; ++i) model.record(sampler.next());
  return model;
}

void BM_SyncMbqStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TabularMdp mdp = random_mdp(n, 4, 7);
  const EmpiricalModel model = sampled_model(mdp, 50L * mdp.pair_count());
  QTable q = QTable::zeros(n, 4);
  for (auto _ : state) {
    q = syncmbq_step(q, model, 0.1, 0.9);
    benchmark::DoNotOptimize(q.values.data());
  }
  state.SetItemsProcessed(state.iterations() * mdp.pair_count());
}
BENCHMARK(BM_SyncMbqStep)->Arg(4)->Arg(16)->Arg(64);

void BM_QlearningStep(benchmark::State& state) {
  QTable q = QTable::zeros(64, 4);
  Transition t;
  t.state = 3;
  t.action = 1;
  t.next_state = 11;
  t.reward = 0.5;
  for (auto _ : state) {
    q = qlearning_step(q, t, 0.1, 0.9);
    benchmark::DoNotOptimize(q.values.data());
  }
}
BENCHMARK(BM_QlearningStep);

void BM_ValueIteration(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TabularMdp mdp = random_mdp(n, 4, 7);
  for (auto _ : state) {
    auto result = value_iteration(mdp, 1e-8);
    benchmark::DoNotOptimize(result.q.values.data());
  }
}
BENCHMARK(BM_ValueIteration)->Arg(8)->Arg(32);

void BM_NoiseVector(benchmark::State& state) {
  const TabularMdp mdp = random_mdp(10, 5, 7);
  const EmpiricalModel model = sampled_model(mdp, 5000);
  const QTable q_star = value_iteration(mdp, 1e-9).q;
  for (auto _ : state) {
    QTable w = noise_vector(model, mdp, q_star);
    benchmark::DoNotOptimize(w.values.data());
  }
}
BENCHMARK(BM_NoiseVector);

void BM_ComparisonRun(benchmark::State& state) {
  const TabularMdp mdp = random_mdp(4, 4, 7);
  TrainerConfig config;
  config.step_size = 0.1;
  config.discount = 0.9;
  config.total_steps = static_cast<long>(state.range(0));
  config.sampler = SamplerSpec::iid_uniform(16, 3);
  config.log_stride = config.total_steps;
  for (auto _ : state) {
    ComparisonTrace trace = run_with_comparisons(mdp, config);
    benchmark::DoNotOptimize(trace.final_inf_error);
  }
  state.SetItemsProcessed(state.iterations() * config.total_steps);
}
BENCHMARK(BM_ComparisonRun)->Arg(1000)->Arg(10000);

void BM_TaxiEpisode(benchmark::State& state) {
  const auto env = taxi();
  const QTable q = QTable::zeros(500, 6);
  EpisodicSampler sampler(SamplerSpec::epsilon_greedy(0.1, 5), *env);
  for (auto _ : state) {
    for (int i = 0; i < 200; ++i) {
      benchmark::DoNotOptimize(sampler.next(q).next_state);
    }
  }
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_TaxiEpisode);

}  // namespace

BENCHMARK_MAIN();
