#include "mbae/dynamics_model.hpp"

#include <cmath>

#include "mbae/errors.hpp"

namespace mbae {

namespace {

std::vector<LayerSpec> generator_layers(const DynamicsModelConfig& config,
                                        std::size_t out_width) {
  std::vector<LayerSpec> layers;
  layers.push_back(LayerSpec::dropout(config.dropout_input));
  bool first = true;
  for (std::size_t width : config.generator_blocks) {
    if (!first) layers.push_back(LayerSpec::dropout(config.dropout_hidden));
    layers.push_back(LayerSpec::concat_skip(width));
    layers.push_back(LayerSpec::relu());
    first = false;
  }
  layers.push_back(LayerSpec::dropout(config.dropout_output));
  layers.push_back(LayerSpec::dense(out_width));
  return layers;
}

std::vector<LayerSpec> mlp_layers(const std::vector<std::size_t>& hidden,
                                  std::size_t out_width) {
  std::vector<LayerSpec> layers;
  for (std::size_t width : hidden) {
    layers.push_back(LayerSpec::dense(width));
    layers.push_back(LayerSpec::relu());
  }
  layers.push_back(LayerSpec::dense(out_width));
  return layers;
}

double softplus(double x) {
  // log(1 + e^x) without overflow for large |x|.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

DynamicsModel::DynamicsModel(std::size_t state_width, std::size_t action_width,
                             const DynamicsModelConfig& config, Rng& init_rng)
    : state_width_(state_width),
      action_width_(action_width),
      noise_width_(config.noise_width == 0 ? action_width : config.noise_width),
      mse_blend_(config.mse_blend),
      generator_(state_width + action_width + noise_width_,
                 generator_layers(config, state_width), init_rng),
      discriminator_(2 * state_width + action_width,
                     mlp_layers(config.discriminator_hidden, 1), init_rng),
      reward_(state_width + action_width, mlp_layers(config.reward_hidden, 1), init_rng),
      gen_opt_(Optimizer::adam(config.lr_generator)),
      disc_opt_(Optimizer::adam(config.lr_discriminator)),
      reward_opt_(Optimizer::adam(config.lr_reward)),
      generator_map_(generator_) {
  if (mse_blend_ < 0.0 || mse_blend_ > 1.0) {
    throw ConfigError("mse blend weight must lie in [0, 1]");
  }
}

std::vector<double> DynamicsModel::predict_successor(std::span<const double> state,
                                                     std::span<const double> action,
                                                     std::span<const double> eta) {
  if (state.size() != state_width_ || action.size() != action_width_ ||
      eta.size() != noise_width_) {
    throw ConfigError("predict_successor: input width mismatch");
  }
  std::vector<double> input;
  input.reserve(generator_.input_width());
  input.insert(input.end(), state.begin(), state.end());
  input.insert(input.end(), action.begin(), action.end());
  input.insert(input.end(), eta.begin(), eta.end());
  return generator_.eval(input);
}

double DynamicsModel::predict_reward(std::span<const double> state,
                                     std::span<const double> action) {
  std::vector<double> input;
  input.reserve(reward_.input_width());
  input.insert(input.end(), state.begin(), state.end());
  input.insert(input.end(), action.begin(), action.end());
  return reward_.eval(input)[0];
}

DynamicsModel::Losses DynamicsModel::train_step(std::span<const Experience> batch, Rng& rng) {
  if (batch.empty()) throw ConfigError("dynamics train_step needs a non-empty batch");
  const std::size_t n = batch.size();
  Losses losses;

  // Fake successors for the discriminator phase: generator in train mode,
  // detached (values only).
  Tensor gen_input(n, generator_.input_width());
  for (std::size_t i = 0; i < n; ++i) {
    const Experience& e = batch[i];
    std::size_t col = 0;
    for (double v : e.state) gen_input.at(i, col++) = v;
    for (double v : e.action) gen_input.at(i, col++) = v;
    for (std::size_t k = 0; k < noise_width_; ++k) gen_input.at(i, col++) = rng.normal();
  }
  std::vector<double> fake_values;
  {
    Tape tape;
    Tensor& fake = generator_.forward(tape, gen_input, /*train=*/true, &rng);
    fake_values.assign(fake.values().begin(), fake.values().end());
  }

  // Discriminator step: binary cross-entropy, real triples labeled 1,
  // generated triples labeled 0.
  {
    const std::size_t disc_in = discriminator_.input_width();
    Tensor real_input(n, disc_in);
    Tensor fake_input(n, disc_in);
    for (std::size_t i = 0; i < n; ++i) {
      const Experience& e = batch[i];
      std::size_t col = 0;
      for (double v : e.state) real_input.at(i, col++) = v;
      for (double v : e.action) real_input.at(i, col++) = v;
      for (double v : e.next_state) real_input.at(i, col++) = v;
      for (std::size_t j = 0; j < state_width_ + action_width_; ++j) {
        fake_input.at(i, j) = real_input.at(i, j);
      }
      for (std::size_t j = 0; j < state_width_; ++j) {
        fake_input.at(i, state_width_ + action_width_ + j) = fake_values[i * state_width_ + j];
      }
    }

    Tape tape;
    Tensor& real_logits = discriminator_.forward(tape, real_input, /*train=*/true, &rng);
    Tensor& fake_logits = discriminator_.forward(tape, fake_input, /*train=*/true, &rng);

    const double inv = 1.0 / static_cast<double>(2 * n);
    Tensor real_seed(n, 1);
    Tensor fake_seed(n, 1);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double zr = real_logits.at(i, 0);
      const double zf = fake_logits.at(i, 0);
      loss += softplus(-zr) + softplus(zf);
      real_seed.at(i, 0) = (sigmoid(zr) - 1.0) * inv;
      fake_seed.at(i, 0) = sigmoid(zf) * inv;
    }
    losses.discriminator = loss / static_cast<double>(2 * n);
    if (!std::isfinite(losses.discriminator)) throw NumericError("non-finite disc loss");

    auto g_real = real_logits.grad();
    auto s_real = real_seed.values();
    for (std::size_t i = 0; i < g_real.size(); ++i) g_real[i] += s_real[i];
    auto g_fake = fake_logits.grad();
    auto s_fake = fake_seed.values();
    for (std::size_t i = 0; i < g_fake.size(); ++i) g_fake[i] += s_fake[i];
    tape.run_backward();
    disc_opt_.step(discriminator_.parameters());
    // The fake branch also accumulated into the fake-input leaf; that leaf is
    // detached from the generator, so nothing else to clear.
  }

  // Generator step: lambda * MSE + (1 - lambda) * non-saturating GAN loss,
  // the adversarial part flowing through a frozen discriminator.
  {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t col = state_width_ + action_width_;
      for (std::size_t k = 0; k < noise_width_; ++k) gen_input.at(i, col++) = rng.normal();
    }
    gen_input.zero_grad();

    Tape tape;
    Tensor& fake = generator_.forward(tape, gen_input, /*train=*/true, &rng);

    double mse = 0.0;
    const double inv_elems = 1.0 / static_cast<double>(n * state_width_);
    for (std::size_t i = 0; i < n; ++i) {
      const Experience& e = batch[i];
      for (std::size_t j = 0; j < state_width_; ++j) {
        const double residual = fake.at(i, j) - e.next_state[j];
        mse += residual * residual;
        fake.grad_at(i, j) += mse_blend_ * 2.0 * residual * inv_elems;
      }
    }
    mse *= inv_elems;

    double adversarial = 0.0;
    if (mse_blend_ < 1.0) {
      Tensor condition(n, state_width_ + action_width_);
      for (std::size_t i = 0; i < n; ++i) {
        const Experience& e = batch[i];
        std::size_t col = 0;
        for (double v : e.state) condition.at(i, col++) = v;
        for (double v : e.action) condition.at(i, col++) = v;
      }
      Tensor& disc_input = ops::concat_cols(tape, condition, fake);
      Tensor& logits = discriminator_.forward(tape, disc_input, /*train=*/false);
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double z = logits.at(i, 0);
        adversarial += softplus(-z);
        logits.grad_at(i, 0) += (1.0 - mse_blend_) * (sigmoid(z) - 1.0) * inv_n;
      }
      adversarial *= inv_n;
    }

    losses.generator = mse_blend_ * mse + (1.0 - mse_blend_) * adversarial;
    if (!std::isfinite(losses.generator)) throw NumericError("non-finite generator loss");

    tape.run_backward();
    gen_opt_.step(generator_.parameters());
    // The frozen discriminator picked up gradients on the adversarial path.
    for (Tensor* p : discriminator_.parameters()) p->zero_grad();
  }

  // Reward step: direct regression on observed rewards.
  {
    Tensor input(n, reward_.input_width());
    for (std::size_t i = 0; i < n; ++i) {
      const Experience& e = batch[i];
      std::size_t col = 0;
      for (double v : e.state) input.at(i, col++) = v;
      for (double v : e.action) input.at(i, col++) = v;
    }
    Tape tape;
    Tensor& predicted = reward_.forward(tape, input, /*train=*/true, &rng);
    Tensor seed(n, 1);
    double loss = 0.0;
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double residual = predicted.at(i, 0) - batch[i].reward;
      loss += residual * residual;
      seed.at(i, 0) = 2.0 * residual * inv;
    }
    losses.reward = loss * inv;
    if (!std::isfinite(losses.reward)) throw NumericError("non-finite reward loss");
    backward(tape, predicted, seed);
    reward_opt_.step(reward_.parameters());
  }

  return losses;
}

}  // namespace mbae
