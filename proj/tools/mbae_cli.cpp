// Experiment runner for the particle-navigation actor-critic toolkit.
//
//   mbae run --config cfg.json [--seed N ...] [--out DIR] [--set k=v ...] [--parallel N]
//   mbae ablate --config cfg.json ...           full variant grid
//   mbae plot --out curves.svg agg1.csv ...     overlay aggregate CSVs
//   mbae eval-checkpoint --checkpoint ckpt [--episodes N]
//
// Exit codes: 0 success, 2 bad config, 3 numeric abort during training.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbae/csv.hpp"
#include "mbae/errors.hpp"
#include "mbae/experiment.hpp"
#include "mbae/logging.hpp"
#include "mbae/svg_plot.hpp"
#include "mbae/trainer.hpp"

namespace {

struct RunArgs {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::size_t parallel = 1;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--seed", args.seeds, "seed (repeatable; replaces the config's list)");
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--set", args.overrides, "config override, e.g. train.mbae.p=0.5");
  cmd->add_option("--parallel", args.parallel, "worker threads for runs")
      ->check(CLI::PositiveNumber);
}

mbae::ExperimentConfig load_with_args(const RunArgs& args) {
  mbae::ExperimentConfig config =
      mbae::load_experiment_config(args.config_path, args.overrides);
  if (!args.seeds.empty()) config.seeds = args.seeds;
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  config.validate();
  return config;
}

int run_command(const RunArgs& args, bool full_grid) {
  mbae::ExperimentConfig config = load_with_args(args);
  if (full_grid) config.variants = mbae::ablation_variants();
  config.validate();
  mbae::execute_experiment(config, args.parallel);
  std::cout << "wrote results to " << config.out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"model-based action exploration experiments"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "train the configured variants and seeds");
  add_run_options(run_cmd, run_args);

  RunArgs ablate_args;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "run the full ablation variant grid");
  add_run_options(ablate_cmd, ablate_args);

  std::vector<std::string> plot_inputs;
  std::string plot_out = "curves.svg";
  CLI::App* plot_cmd = app.add_subcommand("plot", "overlay aggregate CSVs into an SVG");
  plot_cmd->add_option("csvs", plot_inputs, "aggregate CSV files")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG path");

  std::string ckpt_path;
  std::size_t eval_episodes = 10;
  CLI::App* eval_cmd = app.add_subcommand("eval-checkpoint", "greedy-evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  eval_cmd->add_option("--episodes", eval_episodes, "greedy episodes to run")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_command(run_args, /*full_grid=*/false);
    if (ablate_cmd->parsed()) return run_command(ablate_args, /*full_grid=*/true);
    if (plot_cmd->parsed()) {
      std::vector<std::filesystem::path> paths(plot_inputs.begin(), plot_inputs.end());
      mbae::plot_curves(paths, plot_out);
      std::cout << "wrote " << plot_out << "\n";
      return 0;
    }
    if (eval_cmd->parsed()) {
      mbae::Trainer trainer = mbae::Trainer::load_checkpoint(ckpt_path);
      double mean = 0.0;
      std::vector<double> returns(eval_episodes);
      for (double& r : returns) {
        r = trainer.run_episode(/*greedy=*/true).episode_return;
        mean += r;
      }
      mean /= static_cast<double>(eval_episodes);
      double var = 0.0;
      for (double r : returns) var += (r - mean) * (r - mean);
      var /= static_cast<double>(eval_episodes);
      std::cout << "episodes_trained " << trainer.episodes_done() << "\n"
                << "eval_episodes " << eval_episodes << "\n"
                << "mean_return " << mbae::format_double(mean) << "\n"
                << "std_return " << mbae::format_double(std::sqrt(var)) << "\n";
      return 0;
    }
  } catch (const mbae::TrainAbortError& e) {
    mbae::log_error(e.what());
    return 3;
  } catch (const mbae::Error& e) {
    mbae::log_error(e.what());
    return 2;
  }
  return 0;
}
