#include "mbae/config_json.hpp"

#include <initializer_list>
#include <set>

#include "config_json_detail.hpp"
#include "mbae/errors.hpp"

namespace mbae {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.contains(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

std::vector<double> bounds_from(const json& j, const char* key, std::size_t dim,
                                double fallback, const std::string& where) {
  if (!j.contains(key)) return std::vector<double>(dim, fallback);
  const json& v = j.at(key);
  if (v.is_number()) return std::vector<double>(dim, v.get<double>());
  if (v.is_array()) {
    auto out = v.get<std::vector<double>>();
    if (out.size() != dim) {
      throw ConfigError(where + "." + key + ": expected " + std::to_string(dim) + " entries");
    }
    return out;
  }
  throw ConfigError(where + "." + key + ": expected number or array");
}

LinearSchedule schedule_from(const json& j, const char* key, LinearSchedule fallback,
                             const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& s = j.at(key);
  const std::string path = where + "." + key;
  require_object(s, path);
  check_keys(s, {"initial", "final", "horizon"}, path);
  LinearSchedule out;
  out.initial = get_or<double>(s, "initial", fallback.initial, path);
  out.final_value = get_or<double>(s, "final", fallback.final_value, path);
  out.horizon = get_or<std::size_t>(s, "horizon", fallback.horizon, path);
  return out;
}

json schedule_to(const LinearSchedule& s) {
  return json{{"initial", s.initial}, {"final", s.final_value}, {"horizon", s.horizon}};
}

}  // namespace

json env_config_to_json(const ParticleEnvConfig& config) {
  json obstacles = json::array();
  for (const Box& box : config.obstacles) {
    obstacles.push_back(json{{"center", box.center}, {"half_extent", box.half_extent}});
  }
  return json{
      {"dim", config.dim},
      {"low", config.low},
      {"high", config.high},
      {"obstacles", obstacles},
      {"step_scale", config.step_scale},
      {"max_steps", config.max_steps},
      {"goal_radius", config.goal_radius},
      {"goal_bonus", config.goal_bonus},
  };
}

ParticleEnvConfig env_config_from_json(const json& j, const std::string& where) {
  require_object(j, where);
  check_keys(j,
             {"dim", "low", "high", "obstacles", "step_scale", "max_steps", "goal_radius",
              "goal_bonus"},
             where);
  ParticleEnvConfig config;
  config.dim = get_or<std::size_t>(j, "dim", 2, where);
  config.low = bounds_from(j, "low", config.dim, -1.0, where);
  config.high = bounds_from(j, "high", config.dim, 1.0, where);
  config.step_scale = get_or<double>(j, "step_scale", 0.1, where);
  config.max_steps = get_or<std::size_t>(j, "max_steps", 64, where);
  config.goal_radius = get_or<double>(j, "goal_radius", 0.1, where);
  config.goal_bonus = get_or<double>(j, "goal_bonus", 1.0, where);
  if (j.contains("obstacles")) {
    const json& arr = j.at("obstacles");
    if (!arr.is_array()) throw ConfigError(where + ".obstacles: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = where + ".obstacles[" + std::to_string(i) + "]";
      const json& o = arr[i];
      require_object(o, path);
      check_keys(o, {"center", "half_extent"}, path);
      Box box;
      box.center = get_or<std::vector<double>>(o, "center", {}, path);
      box.half_extent = get_or<std::vector<double>>(o, "half_extent", {}, path);
      config.obstacles.push_back(std::move(box));
    }
  }
  return config;
}

json train_config_to_json(const TrainConfig& c) {
  const char* norm =
      c.mbae.normalization == DeltaNormalization::kUnit ? "unit" : "policy-std-match";
  return json{
      {"episodes", c.episodes},
      {"horizon", c.horizon},
      {"batch_size", c.batch_size},
      {"updates_per_episode", c.updates_per_episode},
      {"buffer_capacity", c.buffer_capacity},
      {"eval_every", c.eval_every},
      {"eval_episodes", c.eval_episodes},
      {"eval_with_optimized_actions", c.eval_with_optimized_actions},
      {"seed", c.seed},
      {"value",
       {{"hidden", c.value.hidden},
        {"gamma", c.value.gamma},
        {"learning_rate", c.value.learning_rate}}},
      {"policy",
       {{"hidden", c.policy.hidden},
        {"learning_rate", c.policy.learning_rate},
        {"sigma", schedule_to(c.policy.sigma)}}},
      {"dynamics",
       {{"noise_width", c.dynamics.noise_width},
        {"generator_blocks", c.dynamics.generator_blocks},
        {"discriminator_hidden", c.dynamics.discriminator_hidden},
        {"reward_hidden", c.dynamics.reward_hidden},
        {"dropout_input", c.dynamics.dropout_input},
        {"dropout_hidden", c.dynamics.dropout_hidden},
        {"dropout_output", c.dynamics.dropout_output},
        {"mse_blend", c.dynamics.mse_blend},
        {"lr_generator", c.dynamics.lr_generator},
        {"lr_discriminator", c.dynamics.lr_discriminator},
        {"lr_reward", c.dynamics.lr_reward}}},
      {"mbae",
       {{"p", c.mbae.p},
        {"alpha_u", schedule_to(c.mbae.alpha_u)},
        {"length_noise_scale", c.mbae.length_noise_scale},
        {"normalization", norm},
        {"optimize_iters", c.mbae.optimize_iters}}},
      {"dyna",
       {{"enabled", c.dyna.enabled},
        {"synthetic_updates_per_real_update", c.dyna.synthetic_updates_per_real_update},
        {"use_learned_reward", c.dyna.use_learned_reward}}},
  };
}

TrainConfig train_config_from_json(const json& j, const std::string& where) {
  require_object(j, where);
  check_keys(j,
             {"episodes", "horizon", "batch_size", "updates_per_episode", "buffer_capacity",
              "eval_every", "eval_episodes", "eval_with_optimized_actions", "seed", "value",
              "policy", "dynamics", "mbae", "dyna"},
             where);
  TrainConfig c;
  c.episodes = get_or<std::size_t>(j, "episodes", c.episodes, where);
  c.horizon = get_or<std::size_t>(j, "horizon", c.horizon, where);
  c.batch_size = get_or<std::size_t>(j, "batch_size", c.batch_size, where);
  c.updates_per_episode =
      get_or<std::size_t>(j, "updates_per_episode", c.updates_per_episode, where);
  c.buffer_capacity = get_or<std::size_t>(j, "buffer_capacity", c.buffer_capacity, where);
  c.eval_every = get_or<std::size_t>(j, "eval_every", c.eval_every, where);
  c.eval_episodes = get_or<std::size_t>(j, "eval_episodes", c.eval_episodes, where);
  c.eval_with_optimized_actions =
      get_or<bool>(j, "eval_with_optimized_actions", c.eval_with_optimized_actions, where);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed, where);

  if (j.contains("value")) {
    const json& v = j.at("value");
    const std::string path = where + ".value";
    require_object(v, path);
    check_keys(v, {"hidden", "gamma", "learning_rate"}, path);
    c.value.hidden = get_or<std::vector<std::size_t>>(v, "hidden", c.value.hidden, path);
    c.value.gamma = get_or<double>(v, "gamma", c.value.gamma, path);
    c.value.learning_rate = get_or<double>(v, "learning_rate", c.value.learning_rate, path);
  }
  if (j.contains("policy")) {
    const json& p = j.at("policy");
    const std::string path = where + ".policy";
    require_object(p, path);
    check_keys(p, {"hidden", "learning_rate", "sigma"}, path);
    c.policy.hidden = get_or<std::vector<std::size_t>>(p, "hidden", c.policy.hidden, path);
    c.policy.learning_rate = get_or<double>(p, "learning_rate", c.policy.learning_rate, path);
    c.policy.sigma = schedule_from(p, "sigma", c.policy.sigma, path);
  }
  if (j.contains("dynamics")) {
    const json& d = j.at("dynamics");
    const std::string path = where + ".dynamics";
    require_object(d, path);
    check_keys(d,
               {"noise_width", "generator_blocks", "discriminator_hidden", "reward_hidden",
                "dropout_input", "dropout_hidden", "dropout_output", "mse_blend",
                "lr_generator", "lr_discriminator", "lr_reward"},
               path);
    auto& dc = c.dynamics;
    dc.noise_width = get_or<std::size_t>(d, "noise_width", dc.noise_width, path);
    dc.generator_blocks =
        get_or<std::vector<std::size_t>>(d, "generator_blocks", dc.generator_blocks, path);
    dc.discriminator_hidden = get_or<std::vector<std::size_t>>(d, "discriminator_hidden",
                                                               dc.discriminator_hidden, path);
    dc.reward_hidden =
        get_or<std::vector<std::size_t>>(d, "reward_hidden", dc.reward_hidden, path);
    dc.dropout_input = get_or<double>(d, "dropout_input", dc.dropout_input, path);
    dc.dropout_hidden = get_or<double>(d, "dropout_hidden", dc.dropout_hidden, path);
    dc.dropout_output = get_or<double>(d, "dropout_output", dc.dropout_output, path);
    dc.mse_blend = get_or<double>(d, "mse_blend", dc.mse_blend, path);
    dc.lr_generator = get_or<double>(d, "lr_generator", dc.lr_generator, path);
    dc.lr_discriminator = get_or<double>(d, "lr_discriminator", dc.lr_discriminator, path);
    dc.lr_reward = get_or<double>(d, "lr_reward", dc.lr_reward, path);
  }
  if (j.contains("mbae")) {
    const json& m = j.at("mbae");
    const std::string path = where + ".mbae";
    require_object(m, path);
    check_keys(m, {"p", "alpha_u", "length_noise_scale", "normalization", "optimize_iters"},
               path);
    c.mbae.p = get_or<double>(m, "p", c.mbae.p, path);
    c.mbae.alpha_u = schedule_from(m, "alpha_u", c.mbae.alpha_u, path);
    c.mbae.length_noise_scale =
        get_or<double>(m, "length_noise_scale", c.mbae.length_noise_scale, path);
    const std::string norm = get_or<std::string>(
        m, "normalization",
        c.mbae.normalization == DeltaNormalization::kUnit ? "unit" : "policy-std-match", path);
    if (norm == "unit") {
      c.mbae.normalization = DeltaNormalization::kUnit;
    } else if (norm == "policy-std-match") {
      c.mbae.normalization = DeltaNormalization::kPolicyStdMatch;
    } else {
      throw ConfigError(path + ".normalization: expected 'unit' or 'policy-std-match'");
    }
    c.mbae.optimize_iters = get_or<std::size_t>(m, "optimize_iters", c.mbae.optimize_iters, path);
  }
  if (j.contains("dyna")) {
    const json& d = j.at("dyna");
    const std::string path = where + ".dyna";
    require_object(d, path);
    check_keys(d, {"enabled", "synthetic_updates_per_real_update", "use_learned_reward"}, path);
    c.dyna.enabled = get_or<bool>(d, "enabled", c.dyna.enabled, path);
    c.dyna.synthetic_updates_per_real_update = get_or<std::size_t>(
        d, "synthetic_updates_per_real_update", c.dyna.synthetic_updates_per_real_update, path);
    c.dyna.use_learned_reward =
        get_or<bool>(d, "use_learned_reward", c.dyna.use_learned_reward, path);
  }
  return c;
}

std::string configs_to_json_string(const ParticleEnvConfig& env, const TrainConfig& train) {
  json j{{"env", env_config_to_json(env)}, {"train", train_config_to_json(train)}};
  return j.dump();
}

void configs_from_json_string(const std::string& text, ParticleEnvConfig& env,
                              TrainConfig& train) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("corrupt config payload: ") + e.what());
  }
  require_object(j, "config");
  check_keys(j, {"env", "train"}, "config");
  env = env_config_from_json(j.at("env"), "env");
  train = train_config_from_json(j.at("train"), "train");
}

}  // namespace mbae
