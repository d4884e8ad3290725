#include <doctest.h>

#include <cmath>
#include <vector>

#include "mbae/replay_buffer.hpp"
#include "mbae/trainer.hpp"

using namespace mbae;

namespace {

ParticleEnvConfig env_2d() {
  ParticleEnvConfig cfg;
  cfg.dim = 2;
  return cfg;
}

// Desk-scale trainer settings used across these tests.
TrainConfig tiny_train(std::size_t episodes, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.episodes = episodes;
  cfg.horizon = 64;
  cfg.batch_size = 16;
  cfg.updates_per_episode = 4;
  cfg.eval_every = 10;
  cfg.eval_episodes = 3;
  cfg.seed = seed;
  cfg.value.hidden = {16, 8};
  cfg.value.learning_rate = 1e-3;
  cfg.policy.hidden = {16, 8};
  cfg.policy.learning_rate = 1e-3;
  cfg.policy.sigma = {0.4, 0.1, episodes == 0 ? 1 : episodes};
  cfg.dynamics.generator_blocks = {16, 16};
  cfg.dynamics.discriminator_hidden = {16, 8};
  cfg.dynamics.reward_hidden = {16, 8};
  cfg.mbae.p = 0.0;
  cfg.mbae.alpha_u = {1.0, 0.1, episodes == 0 ? 1 : episodes};
  cfg.dyna.enabled = false;
  return cfg;
}

}  // namespace

TEST_CASE("replay buffer evicts strictly FIFO") {
  ReplayBuffer buffer(3);
  for (int i = 0; i < 5; ++i) {
    Experience e;
    e.reward = static_cast<double>(i);
    buffer.push(std::move(e));
  }
  CHECK(buffer.size() == 3);
  CHECK(buffer.at(0).reward == 2.0);  // 0 and 1 evicted first
  CHECK(buffer.at(1).reward == 3.0);
  CHECK(buffer.at(2).reward == 4.0);
}

TEST_CASE("sampling with replacement returns exactly the requested size") {
  ReplayBuffer buffer(8);
  Experience e;
  e.reward = 1.0;
  buffer.push(e);
  Rng rng(1);
  CHECK(buffer.sample(16, rng).size() == 16);  // more than stored: replacement
  ReplayBuffer empty(4);
  CHECK_THROWS_AS(empty.sample(1, rng), UsageError);
}

TEST_CASE("zero episodes produce an empty curve and no updates") {
  TrainConfig cfg = tiny_train(0, 5);
  Trainer trainer(env_2d(), cfg);
  const auto records = trainer.run();
  CHECK(records.empty());
  CHECK(trainer.records().empty());
  CHECK(trainer.env_steps() == 0);
}

TEST_CASE("greedy episodes with a zero-weight policy return zero") {
  TrainConfig cfg = tiny_train(10, 7);
  Trainer trainer(env_2d(), cfg);
  auto params = trainer.policy().net().parameters();
  params[params.size() - 2]->fill(0.0);
  params[params.size() - 1]->fill(0.0);
  const auto result = trainer.run_episode(/*greedy=*/true);
  CHECK(result.episode_return == 0.0);
  CHECK(result.trajectory.size() == 64);  // never terminal, full horizon
}

TEST_CASE("trajectories never exceed the step budget") {
  TrainConfig cfg = tiny_train(2, 11);
  cfg.horizon = 20;
  Trainer trainer(env_2d(), cfg);
  for (int i = 0; i < 5; ++i) {
    CHECK(trainer.run_episode(false).trajectory.size() <= 20);
  }
}

TEST_CASE("identical (config, seed) produce bit-identical curves") {
  TrainConfig cfg = tiny_train(12, 21);
  Trainer a(env_2d(), cfg);
  Trainer b(env_2d(), cfg);
  const auto ra = a.run();
  const auto rb = b.run();
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i] == rb[i]);
}

TEST_CASE("an exploratory episode is reproducible end to end") {
  TrainConfig cfg = tiny_train(5, 33);
  cfg.mbae.p = 0.5;  // exercise the delta path too
  Trainer a(env_2d(), cfg);
  Trainer b(env_2d(), cfg);
  const auto ea = a.run_episode(false);
  const auto eb = b.run_episode(false);
  CHECK(ea.episode_return == eb.episode_return);
  REQUIRE(ea.trajectory.size() == eb.trajectory.size());
  for (std::size_t i = 0; i < ea.trajectory.size(); ++i) {
    CHECK(ea.trajectory[i].state == eb.trajectory[i].state);
    CHECK(ea.trajectory[i].action == eb.trajectory[i].action);
    CHECK(ea.trajectory[i].reward == eb.trajectory[i].reward);
  }
}

TEST_CASE("every experience keeps its action inside [-1,1]") {
  TrainConfig cfg = tiny_train(3, 43);
  cfg.mbae.p = 1.0;
  Trainer trainer(env_2d(), cfg);
  trainer.run();
  for (std::size_t i = 0; i < trainer.buffer().size(); ++i) {
    for (double a : trainer.buffer().at(i).action) {
      CHECK(a >= -1.0);
      CHECK(a <= 1.0);
    }
  }
}

TEST_CASE("p = 0 with DYNA off reduces to a hand-rolled CACLA loop, bit for bit") {
  // Reference implementation of baseline CACLA that never touches the
  // action-exploration module: plain Gaussian sampling plus one discarded
  // uniform per step (the p-coin of the paired-RNG discipline).
  const ParticleEnvConfig env_cfg = env_2d();
  TrainConfig cfg = tiny_train(6, 55);

  Trainer trainer(env_cfg, cfg);
  trainer.run();

  // --- reference ---
  const auto derive = [&](std::uint64_t id) {
    return std::make_unique<Rng>(Rng::derive_stream_seed(cfg.seed, id));
  };
  auto init_rng = derive(0);
  auto env_rng = derive(1);
  auto explore_rng = derive(2);
  auto model_rng = derive(4);
  auto buffer_rng = derive(6);
  auto eval_env_rng = derive(7);

  ParticleEnv env(env_cfg);
  const std::size_t obs_w = env.observation_width();
  ValueFunction value(obs_w, cfg.value, *init_rng);
  GaussianPolicy policy(obs_w, env.action_width(), cfg.policy, *init_rng);
  DynamicsModel dynamics(obs_w, env.action_width(), cfg.dynamics, *init_rng);
  ReplayBuffer buffer(cfg.buffer_capacity);

  std::vector<double> eval_returns;
  const auto greedy_eval = [&]() {
    for (std::size_t e = 0; e < cfg.eval_episodes; ++e) {
      auto obs = env.reset(*eval_env_rng);
      double ret = 0.0;
      for (std::size_t t = 0; t < cfg.horizon; ++t) {
        const StepResult r = env.step(policy.mean_action(obs));
        ret += r.reward;
        obs = r.next_state;
        if (r.terminal) break;
      }
      eval_returns.push_back(ret);
    }
  };

  greedy_eval();  // episode-0 baseline point
  for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
    policy.set_episode(ep);
    auto obs = env.reset(*env_rng);
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      const auto action = policy.sample_action(obs, *explore_rng);
      explore_rng->uniform();  // the p-coin, always consumed
      const StepResult r = env.step(action);
      buffer.push(Experience{obs, action, r.reward, r.next_state, r.terminal});
      obs = r.next_state;
      if (r.terminal) break;
    }
    for (std::size_t round = 0; round < cfg.updates_per_episode; ++round) {
      const auto batch = buffer.sample(cfg.batch_size, *buffer_rng);
      value.td_update(batch);
      std::vector<double> advantages(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) advantages[i] = value.advantage(batch[i]);
      policy.cacla_update(batch, advantages);
      dynamics.train_step(batch, *model_rng);
    }
    if ((ep + 1) % cfg.eval_every == 0 || ep + 1 == cfg.episodes) greedy_eval();
  }

  // Bit-for-bit agreement on parameters and on the evaluation returns.
  CHECK(trainer.value().net().flatten_parameters() == value.net().flatten_parameters());
  CHECK(trainer.policy().net().flatten_parameters() == policy.net().flatten_parameters());
  CHECK(trainer.dynamics().generator_net().flatten_parameters() ==
        dynamics.generator_net().flatten_parameters());

  std::vector<double> trainer_returns;
  for (const RunRecord& r : trainer.records()) trainer_returns.push_back(r.mean_return);
  REQUIRE(eval_returns.size() == trainer.records().size() * cfg.eval_episodes);
  for (std::size_t i = 0; i < trainer.records().size(); ++i) {
    double mean = 0.0;
    for (std::size_t e = 0; e < cfg.eval_episodes; ++e) {
      mean += eval_returns[i * cfg.eval_episodes + e];
    }
    mean /= static_cast<double>(cfg.eval_episodes);
    CHECK(trainer_returns[i] == mean);
  }
}

TEST_CASE("baseline training beats the zero policy on most seeds" * doctest::timeout(300)) {
  // Smoke property: 200 episodes of plain CACLA on the 2D particle env give
  // positive greedy returns in at least 4 of 5 seeds.
  std::size_t improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainConfig cfg = tiny_train(200, seed);
    cfg.updates_per_episode = 8;
    cfg.policy.learning_rate = 3e-3;
    cfg.value.learning_rate = 3e-3;
    Trainer trainer(env_2d(), cfg);
    trainer.run();
    if (trainer.records().back().mean_return > 0.0) ++improved;
  }
  CHECK(improved >= 4);
}
