#include "mbae/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "mbae/binary_io.hpp"
#include "mbae/config_json.hpp"
#include "mbae/errors.hpp"

namespace mbae {

namespace {

// Stream ids; the derivation is part of the checkpoint/determinism contract.
enum StreamId : std::uint64_t {
  kInit = 0,
  kEnv = 1,
  kExplore = 2,
  kMbae = 3,
  kModel = 4,
  kDyna = 5,
  kBuffer = 6,
  kEvalEnv = 7,
  kEvalMbae = 8,
};

std::unique_ptr<Rng> make_stream(std::uint64_t seed, StreamId id) {
  return std::make_unique<Rng>(Rng::derive_stream_seed(seed, id));
}

constexpr std::uint32_t kCheckpointVersion = 1;
constexpr char kMagic[4] = {'M', 'B', 'A', 'E'};
constexpr std::size_t kRecordFields = 11;

}  // namespace

void TrainConfig::validate() const {
  if (horizon == 0) throw ConfigError("episode horizon must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (buffer_capacity == 0) throw ConfigError("buffer capacity must be positive");
  if (eval_every == 0) throw ConfigError("eval cadence must be positive");
  if (eval_episodes == 0) throw ConfigError("eval episode count must be positive");
  if (value.learning_rate <= 0.0 || policy.learning_rate <= 0.0 ||
      dynamics.lr_generator <= 0.0 || dynamics.lr_discriminator <= 0.0 ||
      dynamics.lr_reward <= 0.0) {
    throw ConfigError("all learning rates must be positive");
  }
  if (value.gamma <= 0.0 || value.gamma > 1.0) {
    throw ConfigError("discount factor must lie in (0, 1]");
  }
  mbae.validate();
  dyna.validate();
  policy.sigma.validate("policy sigma");
}

Trainer::Trainer(ParticleEnvConfig env_config, TrainConfig train_config)
    : env_config_(env_config),
      config_(std::move(train_config)),
      env_(env_config_),
      buffer_(1) {
  config_.validate();
  init_rng_ = make_stream(config_.seed, kInit);
  env_rng_ = make_stream(config_.seed, kEnv);
  explore_rng_ = make_stream(config_.seed, kExplore);
  mbae_rng_ = make_stream(config_.seed, kMbae);
  model_rng_ = make_stream(config_.seed, kModel);
  dyna_rng_ = make_stream(config_.seed, kDyna);
  buffer_rng_ = make_stream(config_.seed, kBuffer);
  eval_env_rng_ = make_stream(config_.seed, kEvalEnv);
  eval_mbae_rng_ = make_stream(config_.seed, kEvalMbae);

  const std::size_t obs = env_.observation_width();
  const std::size_t act = env_.action_width();
  value_ = std::make_unique<ValueFunction>(obs, config_.value, *init_rng_);
  policy_ = std::make_unique<GaussianPolicy>(obs, act, config_.policy, *init_rng_);
  dynamics_ = std::make_unique<DynamicsModel>(obs, act, config_.dynamics, *init_rng_);
  buffer_ = ReplayBuffer(config_.buffer_capacity);
}

Trainer::EpisodeResult Trainer::run_episode(bool greedy) {
  Rng& reset_rng = greedy ? *eval_env_rng_ : *env_rng_;
  std::vector<double> obs = env_.reset(reset_rng);

  EpisodeResult result;
  const std::size_t steps = std::min(config_.horizon, env_.max_steps());
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> action;
    bool used_mbae = false;
    double delta_norm = 0.0;
    if (greedy) {
      if (config_.eval_with_optimized_actions) {
        action = optimize_action(obs, *policy_, value_->as_map(), dynamics_->generator_map(),
                                 config_.mbae, episodes_done_, *eval_mbae_rng_);
      } else {
        action = policy_->mean_action(obs);
      }
    } else {
      action = exploratory_action(obs, *policy_, value_->as_map(), dynamics_->generator_map(),
                                  config_.mbae, episodes_done_, *explore_rng_, *mbae_rng_,
                                  &used_mbae, &delta_norm);
    }

    StepResult step = env_.step(action);
    result.trajectory.push_back(Experience{obs, action, step.reward,
                                           step.next_state, step.terminal});
    result.episode_return += step.reward;
    if (used_mbae) {
      ++result.mbae_steps;
      result.delta_norm_sum += delta_norm;
    }
    obs = std::move(step.next_state);
    if (step.terminal) break;
  }
  return result;
}

void Trainer::train_one_episode() {
  policy_->set_episode(episodes_done_);

  EpisodeResult episode = run_episode(/*greedy=*/false);
  for (Experience& e : episode.trajectory) buffer_.push(std::move(e));
  env_steps_ += static_cast<std::int64_t>(episode.trajectory.size());
  window_.mbae_steps += episode.mbae_steps;
  window_.delta_norm_sum += episode.delta_norm_sum;

  for (std::size_t round = 0; round < config_.updates_per_episode; ++round) {
    const std::vector<Experience> batch = buffer_.sample(config_.batch_size, *buffer_rng_);

    window_.value_loss += value_->td_update(batch);
    ++window_.value_updates;

    std::vector<double> advantages(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      advantages[i] = value_->advantage(batch[i]);
    }
    window_.policy_loss += policy_->cacla_update(batch, advantages);

    const DynamicsModel::Losses model_losses = dynamics_->train_step(batch, *model_rng_);
    window_.gen_loss += model_losses.generator;
    window_.disc_loss += model_losses.discriminator;
    window_.reward_loss += model_losses.reward;

    if (config_.dyna.enabled) {
      for (std::size_t k = 0; k < config_.dyna.synthetic_updates_per_real_update; ++k) {
        window_.value_loss += dyna_update(*value_, *dynamics_, batch, config_.dyna, *dyna_rng_);
        ++window_.value_updates;
      }
    }
    ++window_.update_rounds;
  }

  ++episodes_done_;
}

RunRecord Trainer::make_record(double mean_return, double std_return) {
  RunRecord record;
  record.episode = static_cast<std::int64_t>(episodes_done_);
  record.env_steps = env_steps_;
  record.mean_return = mean_return;
  record.std_return = std_return;
  if (window_.value_updates > 0) {
    record.value_loss = window_.value_loss / static_cast<double>(window_.value_updates);
  }
  if (window_.update_rounds > 0) {
    const double inv = 1.0 / static_cast<double>(window_.update_rounds);
    record.policy_loss = window_.policy_loss * inv;
    record.gen_loss = window_.gen_loss * inv;
    record.disc_loss = window_.disc_loss * inv;
    record.reward_loss = window_.reward_loss * inv;
  }
  record.mbae_steps = window_.mbae_steps;
  if (window_.mbae_steps > 0) {
    record.mean_delta_norm = window_.delta_norm_sum / static_cast<double>(window_.mbae_steps);
  }
  return record;
}

void Trainer::evaluate_and_record() {
  std::vector<double> returns(config_.eval_episodes);
  for (double& r : returns) r = run_episode(/*greedy=*/true).episode_return;

  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(returns.size());
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  var /= static_cast<double>(returns.size());

  records_.push_back(make_record(mean, std::sqrt(var)));
  window_.reset();
}

std::vector<RunRecord> Trainer::run() { return run_episodes(config_.episodes); }

std::vector<RunRecord> Trainer::run_episodes(std::size_t count) {
  const std::size_t first_new_record = records_.size();
  if (config_.episodes == 0) return {};

  if (episodes_done_ == 0 && records_.empty()) {
    evaluate_and_record();  // pre-training baseline point at episode 0
  }

  const std::size_t stop = std::min(config_.episodes, episodes_done_ + count);
  while (episodes_done_ < stop) {
    try {
      train_one_episode();
    } catch (const NumericError& err) {
      throw TrainAbortError(static_cast<int>(episodes_done_), err.what());
    }
    if (episodes_done_ % config_.eval_every == 0 || episodes_done_ == config_.episodes) {
      evaluate_and_record();
    }
  }
  return std::vector<RunRecord>(records_.begin() + static_cast<std::ptrdiff_t>(first_new_record),
                                records_.end());
}

// ---------------------------------------------------------------------------
// Checkpointing
// ---------------------------------------------------------------------------

namespace {

using Section = std::variant<std::vector<double>, std::string>;

void write_sections(std::ostream& out, const std::map<std::string, Section>& sections) {
  BinaryWriter w(out);
  w.raw(std::string_view(kMagic, 4));
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(sections.size()));
  for (const auto& [name, payload] : sections) {
    w.string(name);
    if (std::holds_alternative<std::vector<double>>(payload)) {
      w.u8(0);
      w.f64_array(std::get<std::vector<double>>(payload));
    } else {
      w.u8(1);
      w.string(std::get<std::string>(payload));
    }
  }
}

std::map<std::string, Section> read_sections(std::istream& in) {
  BinaryReader r(in);
  const std::string magic = r.raw(4);
  if (magic != std::string_view(kMagic, 4)) {
    throw IoError("not an mbae checkpoint (bad magic bytes)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  std::map<std::string, Section> sections;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.string();
    const std::uint8_t type = r.u8();
    if (type == 0) {
      sections[name] = r.f64_array();
    } else if (type == 1) {
      sections[name] = r.string();
    } else {
      throw IoError("unknown checkpoint section type");
    }
  }
  return sections;
}

const std::vector<double>& need_array(const std::map<std::string, Section>& sections,
                                      const std::string& name) {
  auto it = sections.find(name);
  if (it == sections.end() || !std::holds_alternative<std::vector<double>>(it->second)) {
    throw IoError("checkpoint is missing array section '" + name + "'");
  }
  return std::get<std::vector<double>>(it->second);
}

const std::string& need_string(const std::map<std::string, Section>& sections,
                               const std::string& name) {
  auto it = sections.find(name);
  if (it == sections.end() || !std::holds_alternative<std::string>(it->second)) {
    throw IoError("checkpoint is missing section '" + name + "'");
  }
  return std::get<std::string>(it->second);
}

std::vector<double> pack_records(const std::vector<RunRecord>& records) {
  std::vector<double> flat;
  flat.reserve(records.size() * kRecordFields);
  for (const RunRecord& r : records) {
    flat.push_back(static_cast<double>(r.episode));
    flat.push_back(static_cast<double>(r.env_steps));
    flat.push_back(r.mean_return);
    flat.push_back(r.std_return);
    flat.push_back(r.value_loss);
    flat.push_back(r.policy_loss);
    flat.push_back(r.gen_loss);
    flat.push_back(r.disc_loss);
    flat.push_back(r.reward_loss);
    flat.push_back(static_cast<double>(r.mbae_steps));
    flat.push_back(r.mean_delta_norm);
  }
  return flat;
}

std::vector<RunRecord> unpack_records(const std::vector<double>& flat) {
  if (flat.size() % kRecordFields != 0) throw IoError("corrupt records section");
  std::vector<RunRecord> records(flat.size() / kRecordFields);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double* f = flat.data() + i * kRecordFields;
    RunRecord& r = records[i];
    r.episode = static_cast<std::int64_t>(f[0]);
    r.env_steps = static_cast<std::int64_t>(f[1]);
    r.mean_return = f[2];
    r.std_return = f[3];
    r.value_loss = f[4];
    r.policy_loss = f[5];
    r.gen_loss = f[6];
    r.disc_loss = f[7];
    r.reward_loss = f[8];
    r.mbae_steps = static_cast<std::int64_t>(f[9]);
    r.mean_delta_norm = f[10];
  }
  return records;
}

}  // namespace

void Trainer::save_checkpoint(const std::filesystem::path& path) const {
  std::map<std::string, Section> sections;
  sections["config"] = configs_to_json_string(env_config_, config_);
  sections["counters"] = std::vector<double>{static_cast<double>(episodes_done_),
                                             static_cast<double>(env_steps_)};
  sections["records"] = pack_records(records_);
  sections["window"] = std::vector<double>{
      window_.value_loss, window_.policy_loss, window_.gen_loss, window_.disc_loss,
      window_.reward_loss, static_cast<double>(window_.update_rounds),
      static_cast<double>(window_.value_updates), static_cast<double>(window_.mbae_steps),
      window_.delta_norm_sum};

  sections["value.params"] = value_->net().flatten_parameters();
  sections["policy.params"] = policy_->net().flatten_parameters();
  sections["gen.params"] = dynamics_->generator_net().flatten_parameters();
  sections["disc.params"] = dynamics_->discriminator_net().flatten_parameters();
  sections["reward.params"] = dynamics_->reward_net().flatten_parameters();

  sections["value.opt"] = value_->optimizer().flatten_state();
  sections["policy.opt"] = policy_->optimizer().flatten_state();
  sections["gen.opt"] = dynamics_->generator_optimizer().flatten_state();
  sections["disc.opt"] = dynamics_->discriminator_optimizer().flatten_state();
  sections["reward.opt"] = dynamics_->reward_optimizer().flatten_state();
  sections["opt.steps"] = std::vector<double>{
      static_cast<double>(value_->optimizer().step_count()),
      static_cast<double>(policy_->optimizer().step_count()),
      static_cast<double>(dynamics_->generator_optimizer().step_count()),
      static_cast<double>(dynamics_->discriminator_optimizer().step_count()),
      static_cast<double>(dynamics_->reward_optimizer().step_count())};

  sections["rng.init"] = init_rng_->serialize();
  sections["rng.env"] = env_rng_->serialize();
  sections["rng.explore"] = explore_rng_->serialize();
  sections["rng.mbae"] = mbae_rng_->serialize();
  sections["rng.model"] = model_rng_->serialize();
  sections["rng.dyna"] = dyna_rng_->serialize();
  sections["rng.buffer"] = buffer_rng_->serialize();
  sections["rng.eval_env"] = eval_env_rng_->serialize();
  sections["rng.eval_mbae"] = eval_mbae_rng_->serialize();

  {
    const std::size_t obs = env_.observation_width();
    const std::size_t act = env_.action_width();
    std::vector<double> flat;
    flat.reserve(3 + buffer_.size() * (2 * obs + act + 2));
    flat.push_back(static_cast<double>(buffer_.size()));
    flat.push_back(static_cast<double>(obs));
    flat.push_back(static_cast<double>(act));
    for (std::size_t i = 0; i < buffer_.size(); ++i) {
      const Experience& e = buffer_.at(i);
      flat.insert(flat.end(), e.state.begin(), e.state.end());
      flat.insert(flat.end(), e.action.begin(), e.action.end());
      flat.push_back(e.reward);
      flat.insert(flat.end(), e.next_state.begin(), e.next_state.end());
      flat.push_back(e.terminal ? 1.0 : 0.0);
    }
    sections["buffer"] = std::move(flat);
  }

  // All-or-nothing: write to a sibling temp file, then rename into place.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint file for writing: " + tmp.string());
    write_sections(out, sections);
    if (!out) throw IoError("checkpoint write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Trainer Trainer::load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint file: " + path.string());
  const auto sections = read_sections(in);

  ParticleEnvConfig env_config;
  TrainConfig train_config;
  configs_from_json_string(need_string(sections, "config"), env_config, train_config);

  Trainer trainer(env_config, train_config);

  trainer.value_->net().load_parameters(need_array(sections, "value.params"));
  trainer.policy_->net().load_parameters(need_array(sections, "policy.params"));
  trainer.dynamics_->generator_net().load_parameters(need_array(sections, "gen.params"));
  trainer.dynamics_->discriminator_net().load_parameters(need_array(sections, "disc.params"));
  trainer.dynamics_->reward_net().load_parameters(need_array(sections, "reward.params"));

  const auto& steps = need_array(sections, "opt.steps");
  if (steps.size() != 5) throw IoError("corrupt opt.steps section");
  auto load_opt = [&](Optimizer& opt, Network& net, const std::string& name, double t) {
    opt.init_buffers(net.parameters());
    opt.load_state(need_array(sections, name), static_cast<std::uint64_t>(t));
  };
  load_opt(trainer.value_->optimizer(), trainer.value_->net(), "value.opt", steps[0]);
  load_opt(trainer.policy_->optimizer(), trainer.policy_->net(), "policy.opt", steps[1]);
  load_opt(trainer.dynamics_->generator_optimizer(), trainer.dynamics_->generator_net(),
           "gen.opt", steps[2]);
  load_opt(trainer.dynamics_->discriminator_optimizer(), trainer.dynamics_->discriminator_net(),
           "disc.opt", steps[3]);
  load_opt(trainer.dynamics_->reward_optimizer(), trainer.dynamics_->reward_net(),
           "reward.opt", steps[4]);

  trainer.init_rng_->deserialize(need_string(sections, "rng.init"));
  trainer.env_rng_->deserialize(need_string(sections, "rng.env"));
  trainer.explore_rng_->deserialize(need_string(sections, "rng.explore"));
  trainer.mbae_rng_->deserialize(need_string(sections, "rng.mbae"));
  trainer.model_rng_->deserialize(need_string(sections, "rng.model"));
  trainer.dyna_rng_->deserialize(need_string(sections, "rng.dyna"));
  trainer.buffer_rng_->deserialize(need_string(sections, "rng.buffer"));
  trainer.eval_env_rng_->deserialize(need_string(sections, "rng.eval_env"));
  trainer.eval_mbae_rng_->deserialize(need_string(sections, "rng.eval_mbae"));

  const auto& counters = need_array(sections, "counters");
  if (counters.size() != 2) throw IoError("corrupt counters section");
  trainer.episodes_done_ = static_cast<std::size_t>(counters[0]);
  trainer.env_steps_ = static_cast<std::int64_t>(counters[1]);

  trainer.records_ = unpack_records(need_array(sections, "records"));

  const auto& window = need_array(sections, "window");
  if (window.size() != 9) throw IoError("corrupt window section");
  trainer.window_.value_loss = window[0];
  trainer.window_.policy_loss = window[1];
  trainer.window_.gen_loss = window[2];
  trainer.window_.disc_loss = window[3];
  trainer.window_.reward_loss = window[4];
  trainer.window_.update_rounds = static_cast<std::int64_t>(window[5]);
  trainer.window_.value_updates = static_cast<std::int64_t>(window[6]);
  trainer.window_.mbae_steps = static_cast<std::int64_t>(window[7]);
  trainer.window_.delta_norm_sum = window[8];

  const auto& flat = need_array(sections, "buffer");
  if (flat.size() < 3) throw IoError("corrupt buffer section");
  const std::size_t count = static_cast<std::size_t>(flat[0]);
  const std::size_t obs = static_cast<std::size_t>(flat[1]);
  const std::size_t act = static_cast<std::size_t>(flat[2]);
  const std::size_t stride = 2 * obs + act + 2;
  if (flat.size() != 3 + count * stride) throw IoError("corrupt buffer section");
  for (std::size_t i = 0; i < count; ++i) {
    const double* f = flat.data() + 3 + i * stride;
    Experience e;
    e.state.assign(f, f + obs);
    e.action.assign(f + obs, f + obs + act);
    e.reward = f[obs + act];
    e.next_state.assign(f + obs + act + 1, f + obs + act + 1 + obs);
    e.terminal = f[2 * obs + act + 1] != 0.0;
    trainer.buffer_.push(std::move(e));
  }

  return trainer;
}

}  // namespace mbae
