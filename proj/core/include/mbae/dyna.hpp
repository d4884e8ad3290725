#pragma once

#include <span>

#include "mbae/dynamics_model.hpp"
#include "mbae/errors.hpp"
#include "mbae/rng.hpp"
#include "mbae/value_function.hpp"

namespace mbae {

struct DynaConfig {
  bool enabled = false;
  std::size_t synthetic_updates_per_real_update = 1;
  // Synthetic rewards come from the learned reward net by default; switch
  // off to keep the replayed rewards instead (ablation).
  bool use_learned_reward = true;

  void validate() const {
    if (enabled && synthetic_updates_per_real_update == 0) {
      throw ConfigError("dyna enabled with zero synthetic updates");
    }
  }
};

// One value-function TD update on a synthesized batch: each next state is
// replaced by a generator sample (fresh eta per transition) and each reward
// by the reward net's prediction (or kept, per config). Touches only the
// value function's parameters; returns the synthetic-batch loss.
double dyna_update(ValueFunction& value, DynamicsModel& dynamics,
                   std::span<const Experience> batch, const DynaConfig& config, Rng& rng);

}  // namespace mbae
