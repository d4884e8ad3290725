#include <doctest.h>

#include <cmath>
#include <vector>

#include "mbae/dyna.hpp"

using namespace mbae;

namespace {

// Generator that reproduces the particle kinematics exactly: the interior
// (no clipping) particle map is linear, s' = s + kappa * (u, u), so a single
// dense layer represents it with zero error and ignores eta entirely.
void make_true_dynamics_generator(DynamicsModel& model, std::size_t dim, double kappa) {
  Network& gen = model.generator_net();
  const std::size_t obs = 2 * dim;
  const std::size_t in = gen.input_width();
  std::vector<double> flat(gen.parameter_count(), 0.0);
  // Single dense layer: weight (in, obs), bias (obs).
  for (std::size_t i = 0; i < obs; ++i) flat[i * obs + i] = 1.0;  // identity on state
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t action_row = obs + i;
    flat[action_row * obs + i] = kappa;        // relative-position block
    flat[action_row * obs + dim + i] = kappa;  // agent-position block
  }
  (void)in;
  gen.load_parameters(flat);
}

DynamicsModelConfig identity_generator_config(std::size_t dim) {
  DynamicsModelConfig cfg;
  cfg.generator_blocks = {};  // single dense output layer
  cfg.dropout_input = 0.0;
  cfg.dropout_hidden = 0.0;
  cfg.dropout_output = 0.0;
  cfg.discriminator_hidden = {8};
  cfg.reward_hidden = {8};
  cfg.noise_width = dim;
  return cfg;
}

std::vector<Experience> interior_batch(std::size_t dim, double kappa, Rng& rng, std::size_t n) {
  std::vector<Experience> batch(n);
  for (Experience& e : batch) {
    std::vector<double> agent(dim), target(dim), u(dim);
    for (double& x : agent) x = rng.uniform(-0.5, 0.5);
    for (double& x : target) x = rng.uniform(-0.5, 0.5);
    for (double& x : u) x = rng.uniform(-1.0, 1.0);
    e.state.resize(2 * dim);
    e.next_state.resize(2 * dim);
    e.action = u;
    for (std::size_t i = 0; i < dim; ++i) {
      e.state[i] = agent[i] - target[i];
      e.state[dim + i] = agent[i];
      e.next_state[i] = e.state[i] + kappa * u[i];
      e.next_state[dim + i] = e.state[dim + i] + kappa * u[i];
    }
    e.reward = rng.uniform(-0.1, 0.1);
    e.terminal = false;
  }
  return batch;
}

}  // namespace

TEST_CASE("dyna with an exact generator equals a real td update, bit for bit") {
  const std::size_t dim = 2;
  const double kappa = 0.1;

  Rng data_rng(1);
  const auto batch = interior_batch(dim, kappa, data_rng, 16);

  ValueFunctionConfig vcfg;
  vcfg.hidden = {12, 6};

  // Two identical value functions from the same init stream.
  Rng init_a(7);
  ValueFunction value_a(2 * dim, vcfg, init_a);
  Rng init_b(7);
  ValueFunction value_b(2 * dim, vcfg, init_b);

  Rng minit(9);
  DynamicsModel model(2 * dim, dim, identity_generator_config(dim), minit);
  make_true_dynamics_generator(model, dim, kappa);

  DynaConfig dyna;
  dyna.enabled = true;
  dyna.use_learned_reward = false;  // replayed rewards, so targets must agree

  Rng dyna_rng(11);
  const double real_loss = value_a.td_update(batch);
  const double synth_loss = dyna_update(value_b, model, batch, dyna, dyna_rng);

  CHECK(real_loss == synth_loss);
  CHECK(value_a.net().flatten_parameters() == value_b.net().flatten_parameters());
}

TEST_CASE("dyna touches only the value function's parameters") {
  const std::size_t dim = 2;
  Rng init(13);
  ValueFunctionConfig vcfg;
  vcfg.hidden = {12, 6};
  ValueFunction value(2 * dim, vcfg, init);
  DynamicsModel model(2 * dim, dim, identity_generator_config(dim), init);

  const auto gen_before = model.generator_net().flatten_parameters();
  const auto disc_before = model.discriminator_net().flatten_parameters();
  const auto reward_before = model.reward_net().flatten_parameters();
  const auto value_before = value.net().flatten_parameters();

  Rng data_rng(14);
  const auto batch = interior_batch(dim, 0.1, data_rng, 8);
  DynaConfig dyna;
  dyna.enabled = true;
  Rng rng(15);
  const double loss = dyna_update(value, model, batch, dyna, rng);
  CHECK(std::isfinite(loss));

  CHECK(model.generator_net().flatten_parameters() == gen_before);
  CHECK(model.discriminator_net().flatten_parameters() == disc_before);
  CHECK(model.reward_net().flatten_parameters() == reward_before);
  CHECK(value.net().flatten_parameters() != value_before);
}

TEST_CASE("zero-weight generator and reward net still give a finite loss") {
  const std::size_t dim = 2;
  Rng init(17);
  ValueFunctionConfig vcfg;
  vcfg.hidden = {12, 6};
  ValueFunction value(2 * dim, vcfg, init);
  DynamicsModel model(2 * dim, dim, identity_generator_config(dim), init);
  model.generator_net().load_parameters(
      std::vector<double>(model.generator_net().parameter_count(), 0.0));
  model.reward_net().load_parameters(
      std::vector<double>(model.reward_net().parameter_count(), 0.0));

  Rng data_rng(18);
  const auto batch = interior_batch(dim, 0.1, data_rng, 8);
  DynaConfig dyna;
  dyna.enabled = true;
  Rng rng(19);
  CHECK(std::isfinite(dyna_update(value, model, batch, dyna, rng)));
}

TEST_CASE("empty batches are rejected") {
  const std::size_t dim = 2;
  Rng init(21);
  ValueFunction value(2 * dim, ValueFunctionConfig{}, init);
  DynamicsModel model(2 * dim, dim, identity_generator_config(dim), init);
  DynaConfig dyna;
  Rng rng(22);
  CHECK_THROWS_AS(dyna_update(value, model, {}, dyna, rng), ConfigError);
}

TEST_CASE("dyna config validation") {
  DynaConfig cfg;
  cfg.enabled = true;
  cfg.synthetic_updates_per_real_update = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
