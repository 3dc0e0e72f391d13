#include "cage/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <stdexcept>
#include <thread>

#include "cage/icm.hpp"
#include "cage/stats.hpp"

namespace cage {

namespace fs = std::filesystem;

std::vector<double> run_episodes(Engine& engine, AdversaryKind adversary,
                                 int episode_len, int episodes,
                                 std::uint64_t base_seed,
                                 const BlueController& controller) {
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    Observation obs = engine.reset(adversary, episode_len, mix_seed(base_seed, e));
    double score = 0.0;
    while (!engine.done()) {
      const BlueAction action = controller(obs, engine);
      const StepOutcome out = engine.step(action);
      score += out.reward.original;
      obs = out.observation;
    }
    scores.push_back(score);
  }
  return scores;
}

PpoDefender::PpoDefender(ActorCritic ac, const Topology& topology,
                         std::uint64_t sample_seed)
    : ac_(std::move(ac)),
      space_(topology.host_count()),
      ranks_(topology),
      rng_(sample_seed) {}

PpoDefender::Decision PpoDefender::decide(const std::vector<double>& observation,
                                          const WorldState& world) {
  Decision d;
  d.sample = select_action(ac_, observation, rng_);
  d.concrete = expand_action(space_, static_cast<std::size_t>(d.sample.action),
                             ranks_, world);
  return d;
}

BlueController PpoDefender::controller() {
  return [this](const Observation& obs, const Engine& engine) {
    return decide(obs.to_doubles(), engine.world()).concrete;
  };
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Topology topology_for(const ExperimentConfig& cfg) {
  if (cfg.topology_file.empty()) return build_cage2_topology();
  return load_topology(cfg.topology_file);
}

struct CurveWriter {
  std::ofstream file;
  std::deque<double> window;
  double window_sum = 0.0;
  int window_size;

  CurveWriter(const std::string& path, int window_size)
      : file(path), window_size(window_size) {
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file << "episode,original,window_mean,augmented\n";
  }

  double push(int episode, double original, double augmented) {
    window.push_back(original);
    window_sum += original;
    if (static_cast<int>(window.size()) > window_size) {
      window_sum -= window.front();
      window.pop_front();
    }
    const double window_mean = window_sum / static_cast<double>(window.size());
    file << episode << ',' << format_double(original) << ','
         << format_double(window_mean) << ',' << format_double(augmented) << '\n';
    return window_mean;
  }
};

void train_one_seed(const ExperimentConfig& cfg, const Topology& topology,
                    std::uint64_t seed, SeedResult& result) {
  result.seed = seed;

  EngineConfig engine_cfg = cfg.engine;
  engine_cfg.scheme = cfg.shaping;
  Engine engine(topology, engine_cfg);

  const int obs_dim = static_cast<int>(4 * topology.host_count());
  const ActionSpace space(topology.host_count());
  const DecoyRankTable ranks(topology);

  Rng net_rng(mix_seed(seed, 1));
  ActorCritic ac = ActorCritic::make(obs_dim, static_cast<int>(space.size()),
                                     cfg.ppo.hidden_dims, net_rng);
  Rng icm_rng(mix_seed(seed, 2));
  IcmNetworks icm_nets;
  if (cfg.icm_enabled)
    icm_nets = IcmNetworks::make(obs_dim, static_cast<int>(space.size()), cfg.icm,
                                 icm_rng);
  Rng sample_rng(mix_seed(seed, 3));

  const std::string tag = "_seed" + std::to_string(seed);
  CurveWriter curve(cfg.out_dir + "/curve" + tag + ".csv", cfg.curve_window);
  std::ofstream updates(cfg.out_dir + "/updates" + tag + ".csv");
  if (!updates)
    throw std::runtime_error("cannot open updates file for seed " +
                             std::to_string(seed));
  updates << "episode,window_mean,timesteps,loss,clip_term,value_loss,entropy,"
             "approx_kl,clip_fraction,icm_inverse_loss,icm_forward_loss\n";

  const auto write_checkpoint = [&](const std::string& path) {
    Checkpoint ckpt;
    ckpt.seed = seed;
    ckpt.nets.emplace_back("actor", ac.actor);
    ckpt.nets.emplace_back("critic", ac.critic);
    if (cfg.icm_enabled) {
      ckpt.nets.emplace_back("embed", icm_nets.embed);
      ckpt.nets.emplace_back("inverse", icm_nets.inverse);
      ckpt.nets.emplace_back("forward", icm_nets.forward);
    }
    save_checkpoint(path, ckpt);
  };

  RolloutBuffer buffer;
  double last_window_mean = 0.0;
  try {
    for (int episode = 0; episode < cfg.train_episodes; ++episode) {
      Observation obs = engine.reset(cfg.adversary, cfg.episode_len,
                                     mix_seed(seed, 0x10000 + episode));
      std::vector<double> obs_vec = obs.to_doubles();
      double original_sum = 0.0, augmented_sum = 0.0;

      while (!engine.done()) {
        const ActionSample sample = select_action(ac, obs_vec, sample_rng);
        const BlueAction concrete = expand_action(
            space, static_cast<std::size_t>(sample.action), ranks, engine.world());
        const StepOutcome out = engine.step(concrete);
        std::vector<double> next_obs_vec = out.observation.to_doubles();

        double learn_reward = out.reward.augmented;
        if (cfg.icm_enabled) {
          const double r_i = intrinsic_reward(icm_nets, obs_vec, sample.action,
                                              next_obs_vec, cfg.icm.reward_scale);
          learn_reward =
              combine_rewards(out.reward.augmented, r_i, cfg.icm.external_factor,
                              cfg.icm.internal_factor);
        }
        RolloutBuffer::Record rec;
        rec.observation = obs_vec;
        rec.next_observation = next_obs_vec;
        rec.action = sample.action;
        rec.log_prob = sample.log_prob;
        rec.reward = learn_reward;
        rec.value = sample.value;
        rec.terminal = out.done;
        buffer.add(std::move(rec));

        original_sum += out.reward.original;
        augmented_sum += out.reward.augmented;
        obs_vec = std::move(next_obs_vec);
      }

      last_window_mean = curve.push(episode, original_sum, augmented_sum);
      result.episode_original_scores.push_back(original_sum);

      if (static_cast<int>(buffer.size()) >= cfg.ppo.minibatch_timesteps) {
        IcmBatch icm_batch;
        if (cfg.icm_enabled) icm_batch = IcmBatch::from_buffer(buffer);
        const PpoStats stats = ppo_update(ac, buffer, cfg.ppo);
        IcmStats icm_stats;
        if (cfg.icm_enabled) icm_stats = icm_update(icm_nets, icm_batch, cfg.icm);

        updates << episode << ',' << format_double(last_window_mean) << ','
                << stats.timesteps << ',' << format_double(stats.loss) << ','
                << format_double(stats.clip_term) << ','
                << format_double(stats.value_loss) << ','
                << format_double(stats.entropy) << ','
                << format_double(stats.approx_kl) << ','
                << format_double(stats.clip_fraction);
        if (cfg.icm_enabled)
          updates << ',' << format_double(icm_stats.inverse_loss) << ','
                  << format_double(icm_stats.forward_loss) << '\n';
        else
          updates << ",,\n";
      }

      if (cfg.checkpoint_every > 0 && (episode + 1) % cfg.checkpoint_every == 0 &&
          episode + 1 < cfg.train_episodes)
        write_checkpoint(cfg.out_dir + "/ckpt" + tag + "_ep" +
                         std::to_string(episode + 1) + ".bin");
    }
  } catch (const std::exception&) {
    // dump the networks for diagnosis before handing the error upward
    try {
      write_checkpoint(cfg.out_dir + "/ckpt" + tag + "_crash.bin");
    } catch (...) {
    }
    throw;
  }

  result.checkpoint_path = cfg.out_dir + "/ckpt" + tag + ".bin";
  write_checkpoint(result.checkpoint_path);
}

}  // namespace

TrainResult train(const ExperimentConfig& cfg) {
  cfg.validate();
  const Topology topology = topology_for(cfg);
  fs::create_directories(cfg.out_dir);
  save_config(cfg.out_dir + "/config.json", cfg);

  TrainResult result;
  result.seeds.resize(cfg.seeds.size());

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(cfg.seeds.size(), hw);
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cfg.seeds.size()) return;
        SeedResult& slot = result.seeds[i];
        try {
          train_one_seed(cfg, topology, cfg.seeds[i], slot);
        } catch (const std::exception& e) {
          slot.seed = cfg.seeds[i];
          slot.failed = true;
          slot.error = e.what();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();

  bool any_failed = false;
  for (const SeedResult& s : result.seeds) any_failed |= s.failed;
  if (any_failed) {
    std::ofstream failures(cfg.out_dir + "/failures.csv");
    failures << "seed,error\n";
    for (const SeedResult& s : result.seeds)
      if (s.failed) failures << s.seed << ',' << s.error << '\n';
  }
  return result;
}

ActorCritic load_actor_critic(const std::string& checkpoint_path,
                              const Topology& topology) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const DenseNet* actor = ckpt.find("actor");
  const DenseNet* critic = ckpt.find("critic");
  if (!actor || !critic)
    throw std::runtime_error("checkpoint lacks actor/critic: " + checkpoint_path);
  const int obs_dim = static_cast<int>(4 * topology.host_count());
  const auto action_count = static_cast<int>(ActionSpace(topology.host_count()).size());
  if (actor->input_dim() != obs_dim || actor->output_dim() != action_count ||
      critic->input_dim() != obs_dim)
    throw std::runtime_error("checkpoint does not match the topology: " +
                             checkpoint_path);
  return ActorCritic{*actor, *critic};
}

EvalEntry evaluate(const std::string& checkpoint_path, const Topology& topology,
                   const EngineConfig& engine_config, AdversaryKind adversary,
                   int length, int episodes, std::uint64_t seed) {
  PpoDefender defender(load_actor_critic(checkpoint_path, topology), topology,
                       mix_seed(seed, 0xe0a1));
  Engine engine(topology, engine_config);

  EvalEntry entry;
  entry.adversary = adversary;
  entry.length = length;
  entry.episodes = episodes;
  entry.scores = run_episodes(engine, adversary, length, episodes,
                              mix_seed(seed, 0xe0a2), defender.controller());
  entry.mean_score = mean(entry.scores);
  entry.sigma = sample_stddev(entry.scores);
  entry.insufficient_sample = entry.scores.size() < 2;
  return entry;
}

const EvalEntry* EvalReport::find(AdversaryKind adversary, int length) const {
  for (const EvalEntry& e : entries)
    if (e.adversary == adversary && e.length == length) return &e;
  return nullptr;
}

void save_eval_entry(const std::string& path, const std::string& name,
                     const EvalEntry& entry) {
  nlohmann::json j;
  j["name"] = name;
  j["adversary"] = to_string(entry.adversary);
  j["length"] = entry.length;
  j["episodes"] = entry.episodes;
  j["mean"] = entry.mean_score;
  j["sigma"] = entry.sigma;
  j["insufficient_sample"] = entry.insufficient_sample;
  j["scores"] = entry.scores;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << '\n';
}

std::vector<EvalReport> load_eval_reports(const std::string& dir) {
  std::map<std::string, EvalReport> by_name;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  for (const fs::path& path : files) {
    std::ifstream is(path);
    nlohmann::json j;
    is >> j;
    if (!j.contains("adversary") || !j.contains("length")) continue;
    EvalEntry e;
    AdversaryKind adv;
    if (!parse_adversary(j.at("adversary").get<std::string>(), adv)) continue;
    e.adversary = adv;
    e.length = j.at("length").get<int>();
    e.episodes = j.value("episodes", 0);
    e.mean_score = j.value("mean", 0.0);
    e.sigma = j.value("sigma", 0.0);
    e.insufficient_sample = j.value("insufficient_sample", false);
    if (j.contains("scores")) e.scores = j.at("scores").get<std::vector<double>>();
    const std::string name = j.value("name", path.stem().string());
    EvalReport& report = by_name[name];
    report.name = name;
    report.entries.push_back(std::move(e));
  }

  std::vector<EvalReport> reports;
  reports.reserve(by_name.size());
  for (auto& [name, report] : by_name) reports.push_back(std::move(report));
  return reports;
}

void write_report(std::ostream& os, const std::vector<EvalReport>& reports) {
  static constexpr AdversaryKind kAdversaries[] = {AdversaryKind::Bline,
                                                   AdversaryKind::Meander};
  static constexpr int kLengths[] = {30, 50, 100};
  const bool with_p = reports.size() >= 2;

  os << "experiment";
  for (AdversaryKind a : kAdversaries)
    for (int len : kLengths)
      os << ',' << to_string(a) << len << "_score," << to_string(a) << len
         << "_sigma";
  if (with_p)
    for (AdversaryKind a : kAdversaries)
      for (int len : kLengths) os << ",p_" << to_string(a) << len;
  os << '\n';

  char buf[40];
  const auto cell = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };

  for (const EvalReport& report : reports) {
    os << report.name;
    for (AdversaryKind a : kAdversaries)
      for (int len : kLengths) {
        const EvalEntry* e = report.find(a, len);
        if (e)
          os << ',' << cell(e->mean_score) << ',' << cell(e->sigma);
        else
          os << ",,";
      }
    if (with_p) {
      const EvalReport& reference = reports.front();
      for (AdversaryKind a : kAdversaries)
        for (int len : kLengths) {
          const EvalEntry* mine = report.find(a, len);
          const EvalEntry* ref = reference.find(a, len);
          if (&report == &reference || !mine || !ref || mine->scores.size() < 2 ||
              ref->scores.size() < 2) {
            os << ',';
            continue;
          }
          std::snprintf(buf, sizeof buf, "%.6g",
                        welch_p_value(mine->scores, ref->scores));
          os << ',' << buf;
        }
    }
    os << '\n';
  }
}

}  // namespace cage
