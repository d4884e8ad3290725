#pragma once

#include <span>
#include <vector>

#include "mbae/experience.hpp"
#include "mbae/network.hpp"
#include "mbae/optimizer.hpp"

namespace mbae {

struct DynamicsModelConfig {
  std::size_t noise_width = 0;                            // 0 -> action width
  std::vector<std::size_t> generator_blocks = {128, 128};  // concat-skip widths
  std::vector<std::size_t> discriminator_hidden = {128, 64};
  std::vector<std::size_t> reward_hidden = {128, 64};
  double dropout_input = 0.1;
  double dropout_hidden = 0.1;
  double dropout_output = 0.1;
  double mse_blend = 0.9;  // lambda: weight on MSE vs adversarial loss
  double lr_generator = 1e-3;
  double lr_discriminator = 1e-3;
  double lr_reward = 1e-3;
};

// Learned environment models: a stochastic successor-state generator trained
// as a conditional GAN with a blended MSE + non-saturating adversarial loss,
// a plain-MLP discriminator over (s, u, s') triples, and a reward regressor
// over (s, u). The generator uses concat-skip connectivity with dropout on
// the input, hidden, and output layers.
class DynamicsModel {
 public:
  DynamicsModel(std::size_t state_width, std::size_t action_width,
                const DynamicsModelConfig& config, Rng& init_rng);

  // Generator eval forward; pure function of (state, action, eta).
  std::vector<double> predict_successor(std::span<const double> state,
                                        std::span<const double> action,
                                        std::span<const double> eta);

  double predict_reward(std::span<const double> state, std::span<const double> action);

  struct Losses {
    double generator = 0.0;
    double discriminator = 0.0;
    double reward = 0.0;
  };

  // One discriminator step, one generator step, one reward step, in that
  // order; returns the pre-step losses.
  Losses train_step(std::span<const Experience> batch, Rng& rng);

  std::size_t state_width() const { return state_width_; }
  std::size_t action_width() const { return action_width_; }
  std::size_t noise_width() const { return noise_width_; }

  DifferentiableMap& generator_map() { return generator_map_; }
  Network& generator_net() { return generator_; }
  Network& discriminator_net() { return discriminator_; }
  Network& reward_net() { return reward_; }
  Optimizer& generator_optimizer() { return gen_opt_; }
  Optimizer& discriminator_optimizer() { return disc_opt_; }
  Optimizer& reward_optimizer() { return reward_opt_; }
  double mse_blend() const { return mse_blend_; }

 private:
  std::size_t state_width_;
  std::size_t action_width_;
  std::size_t noise_width_;
  double mse_blend_;
  Network generator_;
  Network discriminator_;
  Network reward_;
  Optimizer gen_opt_;
  Optimizer disc_opt_;
  Optimizer reward_opt_;
  NetworkMap generator_map_;
};

}  // namespace mbae
