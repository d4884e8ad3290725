#pragma once

#include <span>
#include <vector>

#include "mbae/gaussian_policy.hpp"
#include "mbae/network.hpp"
#include "mbae/rng.hpp"
#include "mbae/schedule.hpp"

namespace mbae {

enum class DeltaNormalization { kUnit, kPolicyStdMatch };

// Model-based action exploration settings. alpha_u anneals over episodes;
// the length noise re-randomizes the normalized delta magnitude.
struct MbaeConfig {
  double p = 0.25;  // chance an exploratory step gets a model-based delta
  LinearSchedule alpha_u = {1.0, 0.1, 1000};
  double length_noise_scale = 0.25;
  DeltaNormalization normalization = DeltaNormalization::kPolicyStdMatch;
  std::size_t optimize_iters = 1;

  void validate() const;
};

// Raw chained gradient d V(G(s, u, eta)) / d u, computed with one backward
// pass through the value map and then the generator map. Parameter gradients
// of both maps are cleared before returning.
std::vector<double> action_value_gradient(std::span<const double> state,
                                          std::span<const double> action,
                                          std::span<const double> eta,
                                          DifferentiableMap& generator,
                                          DifferentiableMap& value);

// One exploratory delta: sample u-hat from the policy, draw eta, chain the
// gradient, normalize (unit or to the policy std norm), then scale by
// alpha_u * (1 + |length noise|). A zero gradient yields a zero delta. The
// result is always a non-negative multiple of the raw gradient.
std::vector<double> get_action_delta(std::span<const double> state, GaussianPolicy& policy,
                                     DifferentiableMap& value, DifferentiableMap& generator,
                                     const MbaeConfig& config, std::size_t episode, Rng& rng);

// Gaussian exploration with a p-coin MBAE kick. The coin is flipped on every
// call, even at p = 0, and the delta path draws from its own stream
// (`delta_rng`), so a baseline run and an MBAE run with the same seed differ
// only in the applied deltas. Outputs are clipped to [-1, 1].
// `used_mbae`/`delta_norm` report whether a delta was applied and its L2 norm.
std::vector<double> exploratory_action(std::span<const double> state, GaussianPolicy& policy,
                                       DifferentiableMap& value, DifferentiableMap& generator,
                                       const MbaeConfig& config, std::size_t episode,
                                       Rng& action_rng, Rng& delta_rng,
                                       bool* used_mbae = nullptr, double* delta_norm = nullptr);

// Iterative variant: start at the policy mean and keep adding deltas
// (fresh eta each iteration, clipping after each) for optimize_iters steps.
// Greedy-improvement mode for evaluation.
std::vector<double> optimize_action(std::span<const double> state, GaussianPolicy& policy,
                                    DifferentiableMap& value, DifferentiableMap& generator,
                                    const MbaeConfig& config, std::size_t episode, Rng& rng);

}  // namespace mbae
