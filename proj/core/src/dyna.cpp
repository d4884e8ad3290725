#include "mbae/dyna.hpp"

#include <vector>

namespace mbae {

double dyna_update(ValueFunction& value, DynamicsModel& dynamics,
                   std::span<const Experience> batch, const DynaConfig& config, Rng& rng) {
  if (batch.empty()) throw ConfigError("dyna_update needs a non-empty batch");

  std::vector<Experience> synthetic(batch.begin(), batch.end());
  std::vector<double> eta(dynamics.noise_width());
  for (Experience& e : synthetic) {
    for (double& x : eta) x = rng.normal();
    e.next_state = dynamics.predict_successor(e.state, e.action, eta);
    if (config.use_learned_reward) {
      e.reward = dynamics.predict_reward(e.state, e.action);
    }
  }
  return value.td_update(synthetic);
}

}  // namespace mbae
