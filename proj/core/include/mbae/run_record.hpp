#pragma once

#include <cstdint>

namespace mbae {

// One learning-curve row, emitted at every greedy-evaluation point.
struct RunRecord {
  std::int64_t episode = 0;
  std::int64_t env_steps = 0;      // cumulative training steps
  double mean_return = 0.0;        // over the greedy evaluation episodes
  double std_return = 0.0;
  double value_loss = 0.0;         // means over the preceding window
  double policy_loss = 0.0;
  double gen_loss = 0.0;
  double disc_loss = 0.0;
  double reward_loss = 0.0;
  std::int64_t mbae_steps = 0;     // model-based kicks in the window
  double mean_delta_norm = 0.0;

  bool operator==(const RunRecord&) const = default;
};

}  // namespace mbae
