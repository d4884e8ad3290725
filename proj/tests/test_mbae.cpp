#include <doctest.h>

#include <cmath>
#include <vector>

#include "mbae/action_exploration.hpp"
#include "mbae/dynamics_model.hpp"
#include "mbae/value_function.hpp"

#include "support/finite_diff.hpp"

using namespace mbae;

namespace {

// Exact hand-set pieces for the analytic oracle: G(s, u, eta) = s + u and
// V(x) = -||x - g||^2, so grad_u V(G(s, u, eta)) = 2 (g - s - u).

Network make_linear_shift(std::size_t n, Rng& init) {
  Network net(3 * n, {LayerSpec::dense(n)}, init);
  std::vector<double> flat(3 * n * n + n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    flat[i * n + i] = 1.0;            // state block
    flat[(n + i) * n + i] = 1.0;      // action block; eta block stays zero
  }
  net.load_parameters(flat);
  return net;
}

class QuadraticValue final : public DifferentiableMap {
 public:
  explicit QuadraticValue(std::vector<double> goal)
      : goal_(Tensor::row(std::move(goal))) {}

  std::size_t in_width() const override { return goal_.cols(); }
  std::size_t out_width() const override { return 1; }
  Tensor& apply(Tape& tape, Tensor& input) override {
    Tensor& diff = ops::sub(tape, input, goal_);
    Tensor& sq = ops::square(tape, diff);
    Tensor& total = ops::sum_all(tape, sq);
    return ops::scale(tape, total, -1.0);
  }
  void zero_param_grads() override { goal_.zero_grad(); }

  double value_at(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - goal_.values()[i];
      s += d * d;
    }
    return -s;
  }

 private:
  Tensor goal_;
};

GaussianPolicy zero_policy(std::size_t state_w, std::size_t action_w, double sigma,
                           std::uint64_t seed) {
  GaussianPolicyConfig cfg;
  cfg.hidden = {8};
  cfg.sigma = {sigma, sigma, 1};
  Rng init(seed);
  GaussianPolicy p(state_w, action_w, cfg, init);
  auto params = p.net().parameters();
  params[params.size() - 2]->fill(0.0);
  params[params.size() - 1]->fill(0.0);
  return p;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("flat value function yields a zero delta") {
  const std::size_t n = 3;
  Rng init(1);
  ValueFunctionConfig vcfg;
  vcfg.hidden = {8};
  ValueFunction value(n, vcfg, init);
  auto params = value.net().parameters();
  params[params.size() - 2]->fill(0.0);
  params[params.size() - 1]->fill(0.0);

  Rng ginit(2);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  GaussianPolicy policy = zero_policy(n, n, 0.2, 3);

  MbaeConfig cfg;
  Rng rng(4);
  const std::vector<double> state = {0.1, 0.2, 0.3};
  const auto delta = get_action_delta(state, policy, value.as_map(), gen_map, cfg, 0, rng);
  for (double d : delta) CHECK(d == 0.0);
}

TEST_CASE("analytic oracle: delta is a positive multiple of 2(g - s - u)") {
  const std::size_t n = 3;
  Rng ginit(5);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  QuadraticValue value({0.8, -0.4, 0.5});
  GaussianPolicy policy = zero_policy(n, n, 0.2, 6);
  policy.set_episode(0);

  MbaeConfig cfg;
  cfg.normalization = DeltaNormalization::kPolicyStdMatch;

  const std::vector<double> state = {0.1, -0.2, 0.3};

  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    Rng rng(seed);
    Rng replay(seed);  // same stream: reproduce the internal u-hat draw
    const std::vector<double> u_hat = policy.sample_action(state, replay);

    const auto delta = get_action_delta(state, policy, value.as_map(), gen_map, cfg, 0, rng);

    const std::vector<double> goal = {0.8, -0.4, 0.5};
    std::vector<double> oracle(n);
    for (std::size_t i = 0; i < n; ++i) {
      oracle[i] = 2.0 * (goal[i] - state[i] - u_hat[i]);
    }

    CHECK(cosine(delta, oracle) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("unit normalization with zero length noise gives ||delta|| == alpha_u") {
  const std::size_t n = 2;
  Rng ginit(7);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  QuadraticValue value({1.0, 1.0});
  GaussianPolicy policy = zero_policy(n, n, 0.3, 8);

  MbaeConfig cfg;
  cfg.normalization = DeltaNormalization::kUnit;
  cfg.length_noise_scale = 0.0;
  cfg.alpha_u = {0.7, 0.1, 100};

  Rng rng(9);
  const std::vector<double> state = {0.0, 0.0};
  const auto delta = get_action_delta(state, policy, value.as_map(), gen_map, cfg, 0, rng);
  CHECK(norm(delta) == doctest::Approx(0.7).epsilon(1e-12));

  const auto later = get_action_delta(state, policy, value.as_map(), gen_map, cfg, 100, rng);
  CHECK(norm(later) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("policy-std normalization rescales the delta to ||sigma|| * alpha") {
  const std::size_t n = 4;
  Rng ginit(10);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  QuadraticValue value({1.0, 1.0, 1.0, 1.0});
  GaussianPolicy policy = zero_policy(n, n, 0.2, 11);
  policy.set_episode(0);

  MbaeConfig cfg;
  cfg.normalization = DeltaNormalization::kPolicyStdMatch;
  cfg.length_noise_scale = 0.0;
  cfg.alpha_u = {1.0, 1.0, 1};

  Rng rng(12);
  const std::vector<double> state = {0.2, 0.1, -0.1, 0.0};
  const auto delta = get_action_delta(state, policy, value.as_map(), gen_map, cfg, 0, rng);
  CHECK(norm(delta) == doctest::Approx(policy.sigma_l2_norm()).epsilon(1e-12));
}

TEST_CASE("chained gradient matches finite differences over the action") {
  // Random untrained model pair, the chain V(G(s, u, eta)) differentiated
  // through both networks.
  const std::size_t obs = 4;
  const std::size_t act = 2;
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    Rng init(100 + trial);
    ValueFunctionConfig vcfg;
    vcfg.hidden = {12, 6};
    ValueFunction value(obs, vcfg, init);
    DynamicsModelConfig dcfg;
    dcfg.generator_blocks = {16, 16};
    dcfg.discriminator_hidden = {8};
    dcfg.reward_hidden = {8};
    DynamicsModel dynamics(obs, act, dcfg, init);

    Rng rng(200 + trial);
    std::vector<double> s(obs), u(act), eta(dynamics.noise_width());
    for (double& x : s) x = rng.uniform(-1, 1);
    for (double& x : u) x = rng.uniform(-1, 1);
    for (double& x : eta) x = rng.normal();

    const auto analytic =
        action_value_gradient(s, u, eta, dynamics.generator_map(), value.as_map());

    const auto f = [&](std::span<const double> uu) {
      return value.value(dynamics.predict_successor(s, uu, eta));
    };
    const auto fd = testing::finite_difference_gradient(f, u);
    CHECK(testing::all_close(analytic, fd));
  }
}

TEST_CASE("p = 0 reproduces plain Gaussian exploration, draw for draw") {
  const std::size_t n = 3;
  Rng init(13);
  ValueFunctionConfig vcfg;
  vcfg.hidden = {8};
  ValueFunction value(n, vcfg, init);
  Rng ginit(14);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  GaussianPolicy policy = zero_policy(n, n, 0.2, 15);

  MbaeConfig cfg;
  cfg.p = 0.0;

  const std::vector<double> state = {0.3, 0.3, 0.3};
  Rng a(77);
  Rng b(77);
  Rng delta_rng(78);
  const std::string delta_state_before = delta_rng.serialize();
  for (int i = 0; i < 20; ++i) {
    bool used = false;
    const auto explored = exploratory_action(state, policy, value.as_map(), gen_map, cfg, 0, a,
                                             delta_rng, &used);
    const auto sampled = policy.sample_action(state, b);
    b.uniform();  // the p-coin consumed by the exploratory path
    CHECK_FALSE(used);
    CHECK(explored == sampled);
  }
  // The delta stream was never touched at p = 0.
  CHECK(delta_rng.serialize() == delta_state_before);
}

TEST_CASE("p = 1 with a flat value function still equals Gaussian exploration") {
  const std::size_t n = 2;
  Rng init(16);
  ValueFunctionConfig vcfg;
  vcfg.hidden = {8};
  ValueFunction value(n, vcfg, init);
  auto params = value.net().parameters();
  params[params.size() - 2]->fill(0.0);
  params[params.size() - 1]->fill(0.0);

  Rng ginit(17);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  GaussianPolicy policy = zero_policy(n, n, 0.2, 18);

  MbaeConfig cfg;
  cfg.p = 1.0;

  const std::vector<double> state = {0.1, 0.1};
  Rng a(55);
  Rng b(55);
  Rng delta_rng(56);
  for (int i = 0; i < 20; ++i) {
    bool used = false;
    double delta_norm = -1.0;
    const auto explored = exploratory_action(state, policy, value.as_map(), gen_map, cfg, 0, a,
                                             delta_rng, &used, &delta_norm);
    const auto sampled = policy.sample_action(state, b);
    b.uniform();
    CHECK(used);
    CHECK(delta_norm == 0.0);
    CHECK(explored == sampled);
  }
}

TEST_CASE("the p-coin lands within 1% of p over ten thousand steps") {
  const std::size_t n = 2;
  Rng ginit(19);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  QuadraticValue value({0.5, 0.5});
  GaussianPolicy policy = zero_policy(n, n, 0.2, 20);
  policy.set_episode(0);

  MbaeConfig cfg;
  cfg.p = 0.25;

  Rng action_rng(21);
  Rng delta_rng(22);
  const std::vector<double> state = {0.0, 0.0};
  std::size_t used_count = 0;
  const std::size_t steps = 10000;
  for (std::size_t i = 0; i < steps; ++i) {
    bool used = false;
    exploratory_action(state, policy, value.as_map(), gen_map, cfg, 0, action_rng, delta_rng,
                       &used);
    if (used) ++used_count;
  }
  const double fraction = static_cast<double>(used_count) / static_cast<double>(steps);
  CHECK(std::abs(fraction - 0.25) < 0.01);
}

TEST_CASE("exploratory actions are always inside [-1, 1]") {
  const std::size_t n = 2;
  Rng ginit(23);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  QuadraticValue value({5.0, 5.0});  // strong pull, big deltas
  GaussianPolicy policy = zero_policy(n, n, 0.5, 24);
  policy.set_episode(0);

  MbaeConfig cfg;
  cfg.p = 1.0;

  Rng a(25);
  Rng d(26);
  const std::vector<double> state = {-0.9, 0.9};
  for (int i = 0; i < 200; ++i) {
    for (double x : exploratory_action(state, policy, value.as_map(), gen_map, cfg, 0, a, d)) {
      CHECK(x >= -1.0);
      CHECK(x <= 1.0);
    }
  }
}

TEST_CASE("optimize_action with a zero delta returns the policy mean") {
  const std::size_t n = 2;
  Rng init(27);
  ValueFunctionConfig vcfg;
  vcfg.hidden = {8};
  ValueFunction value(n, vcfg, init);
  auto params = value.net().parameters();
  params[params.size() - 2]->fill(0.0);
  params[params.size() - 1]->fill(0.0);

  Rng ginit(28);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  GaussianPolicy policy = zero_policy(n, n, 0.2, 29);

  MbaeConfig cfg;
  cfg.optimize_iters = 1;
  Rng rng(30);
  const std::vector<double> state = {0.4, -0.4};
  const auto action = optimize_action(state, policy, value.as_map(), gen_map, cfg, 0, rng);
  const auto mean = policy.mean_action(state);
  CHECK(action == mean);
}

TEST_CASE("iterated deltas climb the predicted value monotonically") {
  // Small-step normalized ascent on a concave quadratic, goal far enough that
  // 20 steps of 0.1 cannot overshoot.
  const std::size_t n = 3;
  Rng ginit(31);
  Network gen = make_linear_shift(n, ginit);
  NetworkMap gen_map(gen);
  const std::vector<double> goal = {2.5, 1.0, 0.5};
  QuadraticValue value(goal);
  GaussianPolicy policy = zero_policy(n, n, 0.2, 32);
  policy.set_episode(0);

  MbaeConfig base;
  base.normalization = DeltaNormalization::kUnit;
  base.length_noise_scale = 0.0;
  base.alpha_u = {0.1, 0.1, 1};

  const std::vector<double> state = {0.2, 0.0, 0.0};

  // The linear generator ignores eta, so iterates are identical across calls
  // with different iteration budgets; walk the budget to expose each iterate.
  double previous = -1e300;
  for (std::size_t iters = 1; iters <= 20; ++iters) {
    MbaeConfig cfg = base;
    cfg.optimize_iters = iters;
    Rng rng(33);
    const auto action = optimize_action(state, policy, value.as_map(), gen_map, cfg, 0, rng);
    for (double x : action) {
      CHECK(x >= -1.0);
      CHECK(x <= 1.0);
    }
    std::vector<double> predicted(n);
    for (std::size_t i = 0; i < n; ++i) predicted[i] = state[i] + action[i];
    const double v = value.value_at(predicted);
    CHECK(v >= previous - 1e-12);
    previous = v;
  }
}

TEST_CASE("alpha_u schedule hits its endpoints monotonically") {
  const LinearSchedule schedule{1.0, 0.1, 500};
  CHECK(schedule.at(0) == 1.0);
  CHECK(schedule.at(500) == doctest::Approx(0.1));
  CHECK(schedule.at(1000) == doctest::Approx(0.1));
  double prev = 2.0;
  for (std::size_t ep = 0; ep <= 600; ep += 25) {
    const double a = schedule.at(ep);
    CHECK(a <= prev + 1e-15);
    prev = a;
  }
}

TEST_CASE("mbae config validation") {
  MbaeConfig cfg;
  cfg.p = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.p = 0.25;
  cfg.optimize_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.optimize_iters = 1;
  cfg.alpha_u.initial = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
