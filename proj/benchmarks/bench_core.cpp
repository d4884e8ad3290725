// Microbenchmarks for the pieces that dominate a training run: batched
// forward/backward passes, one full update round, and the action-delta chain.

#include <benchmark/benchmark.h>

#include "mbae/action_exploration.hpp"
#include "mbae/dyna.hpp"
#include "mbae/dynamics_model.hpp"
#include "mbae/gaussian_policy.hpp"
#include "mbae/network.hpp"
#include "mbae/particle_env.hpp"
#include "mbae/replay_buffer.hpp"
#include "mbae/value_function.hpp"

namespace {

using namespace mbae;

std::vector<Experience> random_batch(std::size_t n, std::size_t obs, std::size_t act,
                                     Rng& rng) {
  std::vector<Experience> batch(n);
  for (Experience& e : batch) {
    e.state.resize(obs);
    e.next_state.resize(obs);
    e.action.resize(act);
    for (double& v : e.state) v = rng.uniform(-1.0, 1.0);
    for (double& v : e.next_state) v = rng.uniform(-1.0, 1.0);
    for (double& v : e.action) v = rng.uniform(-1.0, 1.0);
    e.reward = rng.uniform(-0.1, 0.1);
  }
  return batch;
}

void BM_forward_mlp(benchmark::State& state) {
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  Rng init(1);
  Network net(20, {LayerSpec::dense(128), LayerSpec::relu(), LayerSpec::dense(64),
                   LayerSpec::relu(), LayerSpec::dense(1)},
              init);
  Rng rng(2);
  Tensor x(batch, 20);
  for (double& v : x.values()) v = rng.normal();
  for (auto _ : state) {
    Tape tape;
    Tensor in(x.rows(), x.cols(), std::vector<double>(x.values().begin(), x.values().end()));
    benchmark::DoNotOptimize(net.forward(tape, in).values().data());
  }
}
BENCHMARK(BM_forward_mlp)->Arg(1)->Arg(32)->Arg(64);

void BM_forward_backward_mlp(benchmark::State& state) {
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  Rng init(1);
  Network net(20, {LayerSpec::dense(128), LayerSpec::relu(), LayerSpec::dense(64),
                   LayerSpec::relu(), LayerSpec::dense(1)},
              init);
  Rng rng(2);
  Tensor x(batch, 20);
  for (double& v : x.values()) v = rng.normal();
  Tensor seed(batch, 1);
  seed.fill(1.0);
  for (auto _ : state) {
    Tape tape;
    Tensor in(x.rows(), x.cols(), std::vector<double>(x.values().begin(), x.values().end()));
    Tensor& out = net.forward(tape, in);
    backward(tape, out, seed);
    for (Tensor* p : net.parameters()) p->zero_grad();
  }
}
BENCHMARK(BM_forward_backward_mlp)->Arg(32)->Arg(64);

void BM_td_update(benchmark::State& state) {
  Rng init(1);
  ValueFunctionConfig cfg;
  ValueFunction value(20, cfg, init);
  Rng rng(2);
  auto batch = random_batch(64, 20, 10, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(value.td_update(batch));
  }
}
BENCHMARK(BM_td_update);

void BM_dynamics_train_step(benchmark::State& state) {
  Rng init(1);
  DynamicsModelConfig cfg;
  DynamicsModel model(20, 10, cfg, init);
  Rng rng(2);
  auto batch = random_batch(64, 20, 10, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.train_step(batch, rng).generator);
  }
}
BENCHMARK(BM_dynamics_train_step);

void BM_action_delta(benchmark::State& state) {
  Rng init(1);
  ValueFunctionConfig vcfg;
  ValueFunction value(20, vcfg, init);
  GaussianPolicyConfig pcfg;
  GaussianPolicy policy(20, 10, pcfg, init);
  DynamicsModelConfig dcfg;
  DynamicsModel dynamics(20, 10, dcfg, init);
  MbaeConfig mbae;
  Rng rng(2);
  std::vector<double> obs(20);
  for (double& v : obs) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(get_action_delta(obs, policy, value.as_map(),
                                              dynamics.generator_map(), mbae, 100, rng));
  }
}
BENCHMARK(BM_action_delta);

}  // namespace

BENCHMARK_MAIN();
