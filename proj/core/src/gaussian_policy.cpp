#include "mbae/gaussian_policy.hpp"

#include <algorithm>
#include <cmath>

#include "mbae/errors.hpp"

namespace mbae {

namespace {

std::vector<LayerSpec> policy_layers(const GaussianPolicyConfig& config,
                                     std::size_t action_width) {
  std::vector<LayerSpec> layers;
  for (std::size_t width : config.hidden) {
    layers.push_back(LayerSpec::dense(width));
    layers.push_back(LayerSpec::relu());
  }
  layers.push_back(LayerSpec::dense(action_width));
  layers.push_back(LayerSpec::tanh());
  return layers;
}

}  // namespace

GaussianPolicy::GaussianPolicy(std::size_t state_width, std::size_t action_width,
                               const GaussianPolicyConfig& config, Rng& init_rng)
    : action_width_(action_width),
      sigma_schedule_(config.sigma),
      sigma_(action_width, config.sigma.initial),
      net_(state_width, policy_layers(config, action_width), init_rng),
      optimizer_(Optimizer::adam(config.learning_rate)) {
  sigma_schedule_.validate("policy sigma");
}

std::vector<double> GaussianPolicy::mean_action(std::span<const double> state) {
  return net_.eval(state);
}

std::vector<double> GaussianPolicy::sample_action(std::span<const double> state, Rng& rng) {
  std::vector<double> action = mean_action(state);
  for (std::size_t i = 0; i < action.size(); ++i) {
    action[i] = std::clamp(action[i] + sigma_[i] * rng.normal(), -1.0, 1.0);
  }
  return action;
}

double GaussianPolicy::cacla_update(std::span<const Experience> batch,
                                    std::span<const double> advantages) {
  if (batch.size() != advantages.size()) {
    throw ConfigError("cacla_update: batch/advantage size mismatch");
  }
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < advantages.size(); ++i) {
    if (advantages[i] > 0.0) positive.push_back(i);
  }
  if (positive.empty()) return 0.0;

  const std::size_t n = positive.size();
  const std::size_t width = net_.input_width();
  Tensor states(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    const Experience& e = batch[positive[i]];
    for (std::size_t j = 0; j < width; ++j) states.at(i, j) = e.state[j];
  }

  Tape tape;
  Tensor& means = net_.forward(tape, states, /*train=*/true);

  double loss = 0.0;
  Tensor seed(n, action_width_);
  const double inv = 1.0 / static_cast<double>(n * action_width_);
  for (std::size_t i = 0; i < n; ++i) {
    const Experience& e = batch[positive[i]];
    for (std::size_t j = 0; j < action_width_; ++j) {
      const double residual = means.at(i, j) - e.action[j];
      loss += residual * residual;
      seed.at(i, j) = 2.0 * residual * inv;
    }
  }
  loss *= inv;
  if (!std::isfinite(loss)) throw NumericError("non-finite policy loss");

  backward(tape, means, seed);
  optimizer_.step(net_.parameters());
  return loss;
}

void GaussianPolicy::set_episode(std::size_t episode) {
  const double s = sigma_schedule_.at(episode);
  std::fill(sigma_.begin(), sigma_.end(), s);
}

double GaussianPolicy::sigma_l2_norm() const {
  double s = 0.0;
  for (double v : sigma_) s += v * v;
  return std::sqrt(s);
}

}  // namespace mbae
