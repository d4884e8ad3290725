#pragma once

#include <span>
#include <vector>

#include "mbae/experience.hpp"
#include "mbae/network.hpp"
#include "mbae/optimizer.hpp"

namespace mbae {

struct ValueFunctionConfig {
  std::vector<std::size_t> hidden = {128, 64};  // ReLU hidden layers
  double gamma = 0.9;
  double learning_rate = 1e-3;
};

// State-value estimate V(s) fit by one-step temporal-difference regression.
// The bootstrap target r + gamma * V(s') is treated as a constant; terminal
// transitions bootstrap from zero.
class ValueFunction {
 public:
  ValueFunction(std::size_t state_width, const ValueFunctionConfig& config, Rng& init_rng);

  double value(std::span<const double> state);

  // One optimizer step on mean squared TD error over the batch; returns the
  // pre-step loss.
  double td_update(std::span<const Experience> batch);

  // One-step TD residual r + gamma * V(s') - V(s).
  double advantage(const Experience& e);

  double gamma() const { return gamma_; }
  Network& net() { return net_; }
  Optimizer& optimizer() { return optimizer_; }
  DifferentiableMap& as_map() { return map_; }

 private:
  double gamma_;
  Network net_;
  Optimizer optimizer_;
  NetworkMap map_;
};

}  // namespace mbae
