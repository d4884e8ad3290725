#pragma once

#include <span>
#include <vector>

#include "mbae/experience.hpp"
#include "mbae/network.hpp"
#include "mbae/optimizer.hpp"
#include "mbae/schedule.hpp"

namespace mbae {

struct GaussianPolicyConfig {
  std::vector<std::size_t> hidden = {128, 64};  // ReLU hidden, tanh output
  double learning_rate = 1e-3;
  LinearSchedule sigma = {0.4, 0.1, 1000};      // exploration std anneal
};

// Gaussian policy: MLP mean squashed to [-1,1]^N by tanh, plus a
// state-independent per-dimension exploration std that anneals over
// episodes. Trained with the CACLA rule: regress the mean toward executed
// actions whose advantage is positive.
class GaussianPolicy {
 public:
  GaussianPolicy(std::size_t state_width, std::size_t action_width,
                 const GaussianPolicyConfig& config, Rng& init_rng);

  std::vector<double> mean_action(std::span<const double> state);
  std::vector<double> sample_action(std::span<const double> state, Rng& rng);

  // Masked MSE step over samples with advantage > 0. Skips the optimizer
  // entirely when no sample qualifies, leaving parameters bit-identical.
  // Returns the masked loss (0 when nothing qualified).
  double cacla_update(std::span<const Experience> batch,
                      std::span<const double> advantages);

  // Advance the annealing schedule; called by the trainer once per episode.
  void set_episode(std::size_t episode);
  std::span<const double> sigma() const { return sigma_; }
  double sigma_l2_norm() const;

  std::size_t action_width() const { return action_width_; }
  Network& net() { return net_; }
  Optimizer& optimizer() { return optimizer_; }

 private:
  std::size_t action_width_;
  LinearSchedule sigma_schedule_;
  std::vector<double> sigma_;
  Network net_;
  Optimizer optimizer_;
};

}  // namespace mbae
