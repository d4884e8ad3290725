#include "mbae/experiment.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "config_json_detail.hpp"
#include "mbae/csv.hpp"
#include "mbae/errors.hpp"
#include "mbae/logging.hpp"
#include "mbae/svg_plot.hpp"

namespace mbae {

namespace {

using nlohmann::json;

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return json(text);  // fall back to a plain string
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const json value = parse_override_value(assignment.substr(eq + 1));

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError("bad override path: '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

struct Job {
  std::string variant;
  std::uint64_t seed = 0;
  TrainConfig train;
};

}  // namespace

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("experiment name must not be empty");
  if (seeds.empty()) throw ConfigError("experiment needs at least one seed");
  if (variants.empty()) throw ConfigError("experiment needs at least one variant");
  std::set<std::string> unique_variants(variants.begin(), variants.end());
  if (unique_variants.size() != variants.size()) {
    throw ConfigError("duplicate variant names in experiment");
  }
  std::set<std::uint64_t> unique_seeds(seeds.begin(), seeds.end());
  if (unique_seeds.size() != seeds.size()) {
    throw ConfigError("duplicate seeds in experiment");
  }
  for (const std::string& v : variants) apply_variant(train, v);  // throws on unknown
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  for (const std::string& assignment : overrides) apply_override(doc, assignment);

  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  const std::set<std::string> allowed = {"name",  "env",     "train",           "variants",
                                         "seeds", "out_dir", "aggregate_median"};
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("experiment config: unknown key '" + key + "'");
    }
  }
  for (const char* required : {"name", "env", "train", "seeds"}) {
    if (!doc.contains(required)) {
      throw ConfigError(std::string("experiment config: missing key '") + required + "'");
    }
  }

  ExperimentConfig config;
  config.name = doc.at("name").get<std::string>();
  config.env = env_config_from_json(doc.at("env"), "env");
  config.train = train_config_from_json(doc.at("train"), "train");
  config.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
  if (doc.contains("variants")) {
    config.variants = doc.at("variants").get<std::vector<std::string>>();
  } else {
    config.variants = {"cacla", "cacla+mbae"};
  }
  if (doc.contains("out_dir")) config.out_dir = doc.at("out_dir").get<std::string>();
  if (doc.contains("aggregate_median")) {
    config.aggregate_median = doc.at("aggregate_median").get<bool>();
  }
  config.validate();
  return config;
}

TrainConfig apply_variant(TrainConfig base, const std::string& variant) {
  base.eval_with_optimized_actions = false;
  if (variant == "cacla") {
    base.mbae.p = 0.0;
    base.dyna.enabled = false;
  } else if (variant == "cacla+mbae") {
    base.dyna.enabled = true;
  } else if (variant == "dyna-only") {
    base.mbae.p = 0.0;
    base.dyna.enabled = true;
  } else if (variant == "mbae-unit") {
    base.dyna.enabled = true;
    base.mbae.normalization = DeltaNormalization::kUnit;
  } else if (variant == "mbae-std") {
    base.dyna.enabled = true;
    base.mbae.normalization = DeltaNormalization::kPolicyStdMatch;
  } else if (variant == "mbae-optimize-eval") {
    base.dyna.enabled = true;
    base.eval_with_optimized_actions = true;
  } else {
    throw ConfigError("unknown variant '" + variant + "'");
  }
  return base;
}

const std::vector<std::string>& ablation_variants() {
  static const std::vector<std::string> grid = {"cacla",     "cacla+mbae", "dyna-only",
                                                "mbae-unit", "mbae-std",   "mbae-optimize-eval"};
  return grid;
}

std::filesystem::path run_csv_path(const ExperimentConfig& config, const std::string& variant,
                                   std::uint64_t seed) {
  return config.out_dir / (variant + "_seed" + std::to_string(seed) + ".csv");
}

std::filesystem::path aggregate_csv_path(const ExperimentConfig& config,
                                         const std::string& variant) {
  return config.out_dir / (variant + "_aggregate.csv");
}

std::filesystem::path checkpoint_path(const ExperimentConfig& config, const std::string& variant,
                                      std::uint64_t seed) {
  return config.out_dir / (variant + "_seed" + std::to_string(seed) + ".ckpt");
}

std::filesystem::path overlay_svg_path(const ExperimentConfig& config) {
  return config.out_dir / (config.name + "_curves.svg");
}

void execute_experiment(const ExperimentConfig& config, std::size_t parallel) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);

  std::vector<Job> jobs;
  for (const std::string& variant : config.variants) {
    for (std::uint64_t seed : config.seeds) {
      Job job;
      job.variant = variant;
      job.seed = seed;
      job.train = apply_variant(config.train, variant);
      job.train.seed = seed;
      jobs.push_back(std::move(job));
    }
  }

  std::vector<std::vector<RunRecord>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      const Job& job = jobs[i];
      try {
        log_info("run " + job.variant + " seed " + std::to_string(job.seed) + " starting");
        Trainer trainer(config.env, job.train);
        trainer.run();
        results[i] = trainer.records();
        write_text_file(run_csv_path(config, job.variant, job.seed),
                        run_records_to_csv(results[i]));
        trainer.save_checkpoint(checkpoint_path(config, job.variant, job.seed));
        log_info("run " + job.variant + " seed " + std::to_string(job.seed) + " done");
      } catch (const TrainAbortError& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::make_exception_ptr(TrainAbortError(
              e.episode, "run " + job.variant + " seed " + std::to_string(job.seed) + ": " +
                             e.what()));
        }
        return;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (parallel <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < parallel; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Aggregates and the overlay figure, after all runs landed.
  std::vector<Curve> curves;
  for (std::size_t v = 0; v < config.variants.size(); ++v) {
    std::vector<std::vector<RunRecord>> runs;
    for (std::size_t s = 0; s < config.seeds.size(); ++s) {
      runs.push_back(results[v * config.seeds.size() + s]);
    }
    const std::vector<AggregateRow> rows = aggregate_runs(runs, config.aggregate_median);
    write_text_file(aggregate_csv_path(config, config.variants[v]), aggregate_to_csv(rows));
    curves.push_back(Curve{config.variants[v], rows});
  }
  write_text_file(overlay_svg_path(config), render_learning_curves_svg(curves));
}

}  // namespace mbae
