#pragma once

// Internal: JSON-typed config converters shared between the checkpoint
// payload and the experiment-file parser. Not installed.

#include <string>

#include <json.hpp>

#include "mbae/particle_env.hpp"
#include "mbae/trainer.hpp"

namespace mbae {

nlohmann::json env_config_to_json(const ParticleEnvConfig& config);
ParticleEnvConfig env_config_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace mbae
