#pragma once

#include <string>

#include "mbae/particle_env.hpp"
#include "mbae/trainer.hpp"

namespace mbae {

// Checkpoint payload: both configs in one JSON document. Unknown keys are
// rejected on the way back in; missing keys fall back to struct defaults.
std::string configs_to_json_string(const ParticleEnvConfig& env, const TrainConfig& train);
void configs_from_json_string(const std::string& text, ParticleEnvConfig& env,
                              TrainConfig& train);

}  // namespace mbae
