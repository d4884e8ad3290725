#include "mbae/particle_env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbae/errors.hpp"

namespace mbae {

namespace {

constexpr std::size_t kMaxPlacementAttempts = 10000;

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

bool Box::contains(std::span<const double> point) const {
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (std::abs(point[i] - center[i]) > half_extent[i]) return false;
  }
  return true;
}

ParticleEnv::ParticleEnv(ParticleEnvConfig config) : config_(std::move(config)) {
  if (config_.dim == 0) throw ConfigError("particle env dimension must be positive");
  if (config_.low.empty()) config_.low.assign(config_.dim, -1.0);
  if (config_.high.empty()) config_.high.assign(config_.dim, 1.0);
  if (config_.low.size() != config_.dim || config_.high.size() != config_.dim) {
    throw ConfigError("bounds size does not match env dimension");
  }
  for (std::size_t i = 0; i < config_.dim; ++i) {
    if (!(config_.low[i] < config_.high[i])) {
      throw ConfigError("bound low must be below high in every dimension");
    }
  }
  for (const Box& box : config_.obstacles) {
    if (box.center.size() != config_.dim || box.half_extent.size() != config_.dim) {
      throw ConfigError("obstacle dimensionality does not match env");
    }
  }
  if (config_.step_scale <= 0.0) throw ConfigError("step scale must be positive");
  if (config_.max_steps == 0) throw ConfigError("max steps must be positive");
  agent_.assign(config_.dim, 0.0);
  target_.assign(config_.dim, 0.0);
}

bool ParticleEnv::blocked(std::span<const double> point) const {
  for (const Box& box : config_.obstacles) {
    if (box.contains(point)) return true;
  }
  return false;
}

std::vector<double> ParticleEnv::reset(Rng& rng) {
  auto place = [&](std::vector<double>& out) {
    for (std::size_t attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
      for (std::size_t i = 0; i < config_.dim; ++i) {
        out[i] = rng.uniform(config_.low[i], config_.high[i]);
      }
      if (!blocked(out)) return;
    }
    throw ConfigError("could not place a point in free space after " +
                      std::to_string(kMaxPlacementAttempts) + " attempts");
  };
  place(agent_);
  place(target_);
  steps_ = 0;
  return observe();
}

std::vector<double> ParticleEnv::observe() const {
  std::vector<double> obs(2 * config_.dim);
  for (std::size_t i = 0; i < config_.dim; ++i) {
    obs[i] = agent_[i] - target_[i];
    obs[config_.dim + i] = agent_[i];
  }
  return obs;
}

std::vector<double> ParticleEnv::propose_move(std::span<const double> from,
                                              std::span<const double> action) const {
  std::vector<double> candidate(config_.dim);
  for (std::size_t i = 0; i < config_.dim; ++i) {
    const double clipped = std::clamp(action[i], -1.0, 1.0);
    candidate[i] = std::clamp(from[i] + config_.step_scale * clipped,
                              config_.low[i], config_.high[i]);
  }
  if (blocked(candidate)) {
    return std::vector<double>(from.begin(), from.end());
  }
  return candidate;
}

StepResult ParticleEnv::step(std::span<const double> action) {
  if (action.size() != config_.dim) {
    throw ConfigError("action width does not match env dimension");
  }
  for (double a : action) {
    if (!std::isfinite(a)) throw NumericError("non-finite action component");
  }

  const double d_before = distance(agent_, target_);
  agent_ = propose_move(agent_, action);
  const double d_after = distance(agent_, target_);
  ++steps_;

  const bool reached = d_after < config_.goal_radius;
  double reward = d_before - d_after;
  if (reached) reward += config_.goal_bonus;

  StepResult result;
  result.next_state = observe();
  result.reward = reward;
  result.terminal = reached || steps_ >= config_.max_steps;
  return result;
}

std::vector<double> ParticleEnv::true_dynamics(std::span<const double> observation,
                                               std::span<const double> action) const {
  const std::size_t n = config_.dim;
  if (observation.size() != 2 * n || action.size() != n) {
    throw ConfigError("true_dynamics: observation/action width mismatch");
  }
  std::vector<double> agent(observation.begin() + n, observation.end());
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = agent[i] - observation[i];

  const std::vector<double> moved = propose_move(agent, action);
  std::vector<double> next(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = moved[i] - target[i];
    next[n + i] = moved[i];
  }
  return next;
}

}  // namespace mbae
