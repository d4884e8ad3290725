#include "mbae/action_exploration.hpp"

#include <algorithm>
#include <cmath>

#include "mbae/errors.hpp"
#include "mbae/tape.hpp"

namespace mbae {

namespace {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Delta at a specific action point; get_action_delta and optimize_action
// differ only in where the action comes from.
std::vector<double> scaled_delta_at(std::span<const double> state,
                                    std::span<const double> action, GaussianPolicy& policy,
                                    DifferentiableMap& value, DifferentiableMap& generator,
                                    const MbaeConfig& config, std::size_t episode, Rng& rng) {
  if (generator.in_width() < state.size() + action.size()) {
    throw ConfigError("generator input narrower than (state, action)");
  }
  const std::size_t eta_width = generator.in_width() - state.size() - action.size();
  std::vector<double> eta(eta_width);
  for (double& x : eta) x = rng.normal();

  std::vector<double> grad = action_value_gradient(state, action, eta, generator, value);

  // Length noise is consumed unconditionally to keep draw counts identical
  // across configurations that differ only in scale.
  const double length_jitter = std::abs(rng.normal(0.0, config.length_noise_scale));
  const double alpha = config.alpha_u.at(episode);

  const double norm = l2_norm(grad);
  if (norm == 0.0) {
    return std::vector<double>(action.size(), 0.0);
  }

  double target_norm = 1.0;
  if (config.normalization == DeltaNormalization::kPolicyStdMatch) {
    target_norm = policy.sigma_l2_norm();
  }
  const double factor = alpha * (target_norm / norm) * (1.0 + length_jitter);
  for (double& g : grad) g *= factor;
  return grad;
}

}  // namespace

void MbaeConfig::validate() const {
  if (p < 0.0 || p > 1.0) throw ConfigError("mbae p must lie in [0, 1]");
  alpha_u.validate("alpha_u");
  if (alpha_u.initial > 1.0 || alpha_u.final_value > 1.0) {
    throw ConfigError("alpha_u schedule must stay within (0, 1]");
  }
  if (length_noise_scale < 0.0) throw ConfigError("length noise scale must be >= 0");
  if (optimize_iters < 1) throw ConfigError("optimize_iters must be >= 1");
}

std::vector<double> action_value_gradient(std::span<const double> state,
                                          std::span<const double> action,
                                          std::span<const double> eta,
                                          DifferentiableMap& generator,
                                          DifferentiableMap& value) {
  if (generator.in_width() != state.size() + action.size() + eta.size()) {
    throw ConfigError("generator input width does not match (state, action, eta)");
  }
  if (generator.out_width() != value.in_width() || value.out_width() != 1) {
    throw ConfigError("value map must be scalar over the generator's output");
  }

  Tape tape;
  Tensor input(1, generator.in_width());
  {
    auto vals = input.values();
    std::size_t col = 0;
    for (double v : state) vals[col++] = v;
    for (double v : action) vals[col++] = v;
    for (double v : eta) vals[col++] = v;
  }

  Tensor& successor = generator.apply(tape, input);
  Tensor& predicted_value = value.apply(tape, successor);

  Tensor seed(1, 1);
  seed.values()[0] = 1.0;
  backward(tape, predicted_value, seed);
  input.require_finite_grad("action-value chain");

  std::vector<double> grad(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    grad[i] = input.grad()[state.size() + i];
  }
  generator.zero_param_grads();
  value.zero_param_grads();
  return grad;
}

std::vector<double> get_action_delta(std::span<const double> state, GaussianPolicy& policy,
                                     DifferentiableMap& value, DifferentiableMap& generator,
                                     const MbaeConfig& config, std::size_t episode, Rng& rng) {
  const std::vector<double> sampled = policy.sample_action(state, rng);
  return scaled_delta_at(state, sampled, policy, value, generator, config, episode, rng);
}

std::vector<double> exploratory_action(std::span<const double> state, GaussianPolicy& policy,
                                       DifferentiableMap& value, DifferentiableMap& generator,
                                       const MbaeConfig& config, std::size_t episode,
                                       Rng& action_rng, Rng& delta_rng,
                                       bool* used_mbae, double* delta_norm) {
  std::vector<double> action = policy.sample_action(state, action_rng);
  const bool coin = action_rng.uniform() < config.p;
  if (used_mbae != nullptr) *used_mbae = coin;
  if (delta_norm != nullptr) *delta_norm = 0.0;
  if (coin) {
    const std::vector<double> delta =
        get_action_delta(state, policy, value, generator, config, episode, delta_rng);
    if (delta_norm != nullptr) *delta_norm = l2_norm(delta);
    for (std::size_t i = 0; i < action.size(); ++i) {
      action[i] = std::clamp(action[i] + delta[i], -1.0, 1.0);
    }
  }
  return action;
}

std::vector<double> optimize_action(std::span<const double> state, GaussianPolicy& policy,
                                    DifferentiableMap& value, DifferentiableMap& generator,
                                    const MbaeConfig& config, std::size_t episode, Rng& rng) {
  std::vector<double> action = policy.mean_action(state);
  for (std::size_t iter = 0; iter < config.optimize_iters; ++iter) {
    const std::vector<double> delta =
        scaled_delta_at(state, action, policy, value, generator, config, episode, rng);
    for (std::size_t i = 0; i < action.size(); ++i) {
      action[i] = std::clamp(action[i] + delta[i], -1.0, 1.0);
    }
  }
  return action;
}

}  // namespace mbae
