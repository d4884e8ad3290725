#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "mbae/errors.hpp"
#include "mbae/trainer.hpp"

using namespace mbae;

namespace {

namespace fs = std::filesystem;

ParticleEnvConfig env_2d() {
  ParticleEnvConfig cfg;
  cfg.dim = 2;
  return cfg;
}

TrainConfig tiny_train(std::size_t episodes, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.episodes = episodes;
  cfg.batch_size = 8;
  cfg.updates_per_episode = 2;
  cfg.eval_every = 5;
  cfg.eval_episodes = 2;
  cfg.seed = seed;
  cfg.value.hidden = {12, 6};
  cfg.policy.hidden = {12, 6};
  cfg.policy.sigma = {0.4, 0.1, episodes == 0 ? 1 : episodes};
  cfg.dynamics.generator_blocks = {12, 12};
  cfg.dynamics.discriminator_hidden = {12, 6};
  cfg.dynamics.reward_hidden = {12, 6};
  cfg.mbae.p = 0.25;
  cfg.mbae.alpha_u = {1.0, 0.1, episodes == 0 ? 1 : episodes};
  cfg.dyna.enabled = true;
  return cfg;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mbae_ckpt_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("save then load round-trips every parameter bit") {
  TempDir tmp;
  const fs::path ckpt = tmp.path / "a.ckpt";

  TrainConfig cfg = tiny_train(8, 3);
  Trainer trainer(env_2d(), cfg);
  trainer.run();
  trainer.save_checkpoint(ckpt);

  Trainer loaded = Trainer::load_checkpoint(ckpt);
  CHECK(loaded.episodes_done() == trainer.episodes_done());
  CHECK(loaded.env_steps() == trainer.env_steps());
  CHECK(loaded.value().net().flatten_parameters() ==
        trainer.value().net().flatten_parameters());
  CHECK(loaded.policy().net().flatten_parameters() ==
        trainer.policy().net().flatten_parameters());
  CHECK(loaded.dynamics().generator_net().flatten_parameters() ==
        trainer.dynamics().generator_net().flatten_parameters());
  CHECK(loaded.dynamics().discriminator_net().flatten_parameters() ==
        trainer.dynamics().discriminator_net().flatten_parameters());
  CHECK(loaded.dynamics().reward_net().flatten_parameters() ==
        trainer.dynamics().reward_net().flatten_parameters());
  CHECK(loaded.buffer().size() == trainer.buffer().size());
  REQUIRE(loaded.records().size() == trainer.records().size());
  for (std::size_t i = 0; i < loaded.records().size(); ++i) {
    CHECK(loaded.records()[i] == trainer.records()[i]);
  }
}

TEST_CASE("load then continue matches an uninterrupted run bit for bit") {
  TempDir tmp;
  const fs::path ckpt = tmp.path / "mid.ckpt";

  // Uninterrupted 16 episodes.
  TrainConfig cfg = tiny_train(16, 9);
  Trainer full(env_2d(), cfg);
  full.run();

  // The same 16-episode budget, interrupted after 8 and resumed from disk.
  Trainer first_half(env_2d(), cfg);
  first_half.run_episodes(8);
  first_half.save_checkpoint(ckpt);

  Trainer resumed = Trainer::load_checkpoint(ckpt);
  CHECK(resumed.episodes_done() == 8);
  resumed.run();

  CHECK(resumed.value().net().flatten_parameters() == full.value().net().flatten_parameters());
  CHECK(resumed.policy().net().flatten_parameters() ==
        full.policy().net().flatten_parameters());
  CHECK(resumed.dynamics().generator_net().flatten_parameters() ==
        full.dynamics().generator_net().flatten_parameters());
  REQUIRE(resumed.records().size() == full.records().size());
  for (std::size_t i = 0; i < full.records().size(); ++i) {
    CHECK(resumed.records()[i] == full.records()[i]);
  }
  CHECK(resumed.env_steps() == full.env_steps());
}

TEST_CASE("corrupt magic bytes are rejected, no partial state") {
  TempDir tmp;
  const fs::path ckpt = tmp.path / "bad.ckpt";
  {
    std::ofstream out(ckpt, std::ios::binary);
    out << "NOPE this is not a checkpoint";
  }
  CHECK_THROWS_AS(Trainer::load_checkpoint(ckpt), IoError);
}

TEST_CASE("truncated checkpoints are rejected") {
  TempDir tmp;
  const fs::path good = tmp.path / "good.ckpt";
  const fs::path bad = tmp.path / "trunc.ckpt";

  TrainConfig cfg = tiny_train(2, 5);
  Trainer trainer(env_2d(), cfg);
  trainer.run();
  trainer.save_checkpoint(good);

  // Copy all but the last 100 bytes.
  const auto size = fs::file_size(good);
  std::ifstream in(good, std::ios::binary);
  std::vector<char> bytes(static_cast<std::size_t>(size) - 100);
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  std::ofstream out(bad, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();

  CHECK_THROWS_AS(Trainer::load_checkpoint(bad), IoError);
}

TEST_CASE("missing checkpoint file is an io error") {
  CHECK_THROWS_AS(Trainer::load_checkpoint("/nonexistent/nowhere.ckpt"), IoError);
}
