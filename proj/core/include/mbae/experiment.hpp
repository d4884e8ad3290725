#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mbae/particle_env.hpp"
#include "mbae/trainer.hpp"

namespace mbae {

// Parsed experiment file: environment, base training settings, the variant
// and seed grid, and output location.
struct ExperimentConfig {
  std::string name;
  ParticleEnvConfig env;
  TrainConfig train;
  std::vector<std::string> variants;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir = "out";
  bool aggregate_median = false;

  void validate() const;
};

// Load a JSON experiment file and apply `key.path=value` overrides before
// parsing. Unknown keys anywhere are rejected.
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides);

// Named training variants over a base config:
//   cacla                p = 0, DYNA off (the baseline)
//   cacla+mbae           configured p, DYNA on (the full method)
//   dyna-only            p = 0, DYNA on
//   mbae-unit            full method with unit gradient normalization
//   mbae-std             full method with policy-std normalization
//   mbae-optimize-eval   full method, greedy evaluation iterates deltas
TrainConfig apply_variant(TrainConfig base, const std::string& variant);
const std::vector<std::string>& ablation_variants();

// Runs every (variant, seed) pair, writes one CSV per run, one aggregate CSV
// per variant, and one overlay SVG. `parallel` > 1 runs jobs on worker
// threads; runs share nothing and the aggregate files are written only after
// every contributing run finished.
void execute_experiment(const ExperimentConfig& config, std::size_t parallel = 1);

std::filesystem::path run_csv_path(const ExperimentConfig& config, const std::string& variant,
                                   std::uint64_t seed);
std::filesystem::path aggregate_csv_path(const ExperimentConfig& config,
                                         const std::string& variant);
std::filesystem::path checkpoint_path(const ExperimentConfig& config, const std::string& variant,
                                      std::uint64_t seed);
std::filesystem::path overlay_svg_path(const ExperimentConfig& config);

}  // namespace mbae
