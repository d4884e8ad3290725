#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "mbae/action_exploration.hpp"
#include "mbae/dyna.hpp"
#include "mbae/dynamics_model.hpp"
#include "mbae/gaussian_policy.hpp"
#include "mbae/particle_env.hpp"
#include "mbae/replay_buffer.hpp"
#include "mbae/run_record.hpp"
#include "mbae/value_function.hpp"

namespace mbae {

struct TrainConfig {
  std::size_t episodes = 1000;
  std::size_t horizon = 64;             // per-episode step cap
  std::size_t batch_size = 64;
  std::size_t updates_per_episode = 32;
  std::size_t buffer_capacity = 1u << 16;
  std::size_t eval_every = 10;          // greedy evaluation cadence (episodes)
  std::size_t eval_episodes = 5;
  bool eval_with_optimized_actions = false;  // iterate deltas at eval time
  std::uint64_t seed = 1;

  ValueFunctionConfig value;
  GaussianPolicyConfig policy;
  DynamicsModelConfig dynamics;
  MbaeConfig mbae;
  DynaConfig dyna;

  void validate() const;
};

// The outer training loop: simulate an episode with exploratory actions,
// append to the replay buffer, then run a fixed number of update rounds, each
// sampling one batch and applying, in order, the value TD update, the CACLA
// policy update, the dynamics-model step, and (when enabled) DYNA updates.
// Greedy evaluations every `eval_every` episodes produce the learning curve.
//
// Every random draw comes from a named per-run stream derived from the seed,
// so a (config, seed) pair fully determines each float of the run, and runs
// that differ only in MBAE/DYNA settings stay aligned on the shared streams.
class Trainer {
 public:
  Trainer(ParticleEnvConfig env_config, TrainConfig train_config);

  // Train the remaining episodes; returns the rows recorded during the call.
  std::vector<RunRecord> run();

  // Train at most `count` further episodes (for checkpoint-and-resume flows).
  std::vector<RunRecord> run_episodes(std::size_t count);

  struct EpisodeResult {
    std::vector<Experience> trajectory;
    double episode_return = 0.0;
    std::int64_t mbae_steps = 0;
    double delta_norm_sum = 0.0;
  };

  // One episode with the training streams (exploratory) or the evaluation
  // streams (greedy). Exposed for tests; run() is built on it.
  EpisodeResult run_episode(bool greedy);

  const std::vector<RunRecord>& records() const { return records_; }
  std::size_t episodes_done() const { return episodes_done_; }
  std::int64_t env_steps() const { return env_steps_; }

  ParticleEnv& env() { return env_; }
  ValueFunction& value() { return *value_; }
  GaussianPolicy& policy() { return *policy_; }
  DynamicsModel& dynamics() { return *dynamics_; }
  ReplayBuffer& buffer() { return buffer_; }
  const TrainConfig& config() const { return config_; }

  void save_checkpoint(const std::filesystem::path& path) const;
  static Trainer load_checkpoint(const std::filesystem::path& path);

 private:
  struct Streams;
  void train_one_episode();  // body of run(), throws TrainAbortError on NaN/Inf
  void evaluate_and_record();
  RunRecord make_record(double mean_return, double std_return);

  ParticleEnvConfig env_config_;
  TrainConfig config_;
  ParticleEnv env_;

  std::unique_ptr<Rng> init_rng_;
  std::unique_ptr<Rng> env_rng_;
  std::unique_ptr<Rng> explore_rng_;
  std::unique_ptr<Rng> mbae_rng_;
  std::unique_ptr<Rng> model_rng_;
  std::unique_ptr<Rng> dyna_rng_;
  std::unique_ptr<Rng> buffer_rng_;
  std::unique_ptr<Rng> eval_env_rng_;
  std::unique_ptr<Rng> eval_mbae_rng_;

  std::unique_ptr<ValueFunction> value_;
  std::unique_ptr<GaussianPolicy> policy_;
  std::unique_ptr<DynamicsModel> dynamics_;
  ReplayBuffer buffer_;

  std::size_t episodes_done_ = 0;
  std::int64_t env_steps_ = 0;
  std::vector<RunRecord> records_;

  // Accumulators for the window since the last recorded row.
  struct Window {
    double value_loss = 0.0;
    double policy_loss = 0.0;
    double gen_loss = 0.0;
    double disc_loss = 0.0;
    double reward_loss = 0.0;
    std::int64_t update_rounds = 0;
    std::int64_t value_updates = 0;  // real + synthetic TD updates
    std::int64_t mbae_steps = 0;
    double delta_norm_sum = 0.0;
    void reset() { *this = Window{}; }
  } window_;
};

}  // namespace mbae
