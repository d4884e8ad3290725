#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mbae/rng.hpp"

namespace mbae {

// Axis-aligned box obstacle.
struct Box {
  std::vector<double> center;
  std::vector<double> half_extent;
  bool contains(std::span<const double> point) const;
};

struct ParticleEnvConfig {
  std::size_t dim = 2;
  std::vector<double> low;    // per-dimension; sized to dim on construction
  std::vector<double> high;   // defaults to [-1, 1]
  std::vector<Box> obstacles;
  double step_scale = 0.1;    // kappa: action-to-displacement scale
  std::size_t max_steps = 64;
  double goal_radius = 0.1;
  double goal_bonus = 1.0;
};

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  bool terminal = false;
};

// Continuous grid-world: a point agent steps toward a random target inside a
// bounded arena, blocked by box obstacles. The observation is
// (agent - target, agent), i.e. 2*dim features; reward is the per-step
// decrease in distance to the target plus a bonus on arrival.
class ParticleEnv {
 public:
  explicit ParticleEnv(ParticleEnvConfig config);

  // Places agent and target uniformly at random in free space via rejection
  // sampling (ConfigError after 10^4 misses) and zeroes the step counter.
  std::vector<double> reset(Rng& rng);

  StepResult step(std::span<const double> action);

  std::size_t dim() const { return config_.dim; }
  std::size_t observation_width() const { return 2 * config_.dim; }
  std::size_t action_width() const { return config_.dim; }
  std::size_t max_steps() const { return config_.max_steps; }
  const ParticleEnvConfig& config() const { return config_; }

  std::span<const double> agent_position() const { return agent_; }
  std::span<const double> target_position() const { return target_; }
  std::size_t steps_taken() const { return steps_; }

  // Ground-truth successor observation for (observation, action): the same
  // kinematics as step() without reward or termination. Test/diagnostic
  // oracle for the learned dynamics model.
  std::vector<double> true_dynamics(std::span<const double> observation,
                                    std::span<const double> action) const;

 private:
  std::vector<double> observe() const;
  bool blocked(std::span<const double> point) const;
  std::vector<double> propose_move(std::span<const double> from,
                                   std::span<const double> action) const;

  ParticleEnvConfig config_;
  std::vector<double> agent_;
  std::vector<double> target_;
  std::size_t steps_ = 0;
};

}  // namespace mbae
