#include "mbae/value_function.hpp"

#include <cmath>

#include "mbae/errors.hpp"

namespace mbae {

namespace {

std::vector<LayerSpec> value_layers(const ValueFunctionConfig& config) {
  std::vector<LayerSpec> layers;
  for (std::size_t width : config.hidden) {
    layers.push_back(LayerSpec::dense(width));
    layers.push_back(LayerSpec::relu());
  }
  layers.push_back(LayerSpec::dense(1));
  return layers;
}

}  // namespace

ValueFunction::ValueFunction(std::size_t state_width, const ValueFunctionConfig& config,
                             Rng& init_rng)
    : gamma_(config.gamma),
      net_(state_width, value_layers(config), init_rng),
      optimizer_(Optimizer::adam(config.learning_rate)),
      map_(net_) {
  if (gamma_ <= 0.0 || gamma_ > 1.0) {
    throw ConfigError("discount factor must lie in (0, 1]");
  }
}

double ValueFunction::value(std::span<const double> state) {
  return net_.eval(state)[0];
}

double ValueFunction::td_update(std::span<const Experience> batch) {
  if (batch.empty()) throw ConfigError("td_update needs a non-empty batch");
  const std::size_t n = batch.size();
  const std::size_t width = net_.input_width();

  // Bootstrap targets from the current network, detached.
  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Experience& e = batch[i];
    double bootstrap = 0.0;
    if (!e.terminal) bootstrap = gamma_ * value(e.next_state);
    targets[i] = e.reward + bootstrap;
  }

  Tensor states(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) states.at(i, j) = batch[i].state[j];
  }

  Tape tape;
  Tensor& predictions = net_.forward(tape, states, /*train=*/true);

  double loss = 0.0;
  Tensor seed(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double residual = predictions.at(i, 0) - targets[i];
    loss += residual * residual;
    seed.at(i, 0) = 2.0 * residual / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  if (!std::isfinite(loss)) throw NumericError("non-finite TD loss");

  backward(tape, predictions, seed);
  optimizer_.step(net_.parameters());
  return loss;
}

double ValueFunction::advantage(const Experience& e) {
  double bootstrap = 0.0;
  if (!e.terminal) bootstrap = gamma_ * value(e.next_state);
  return e.reward + bootstrap - value(e.state);
}

}  // namespace mbae
