#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cage/config.hpp"
#include "cage/dense_net.hpp"
#include "cage/engine.hpp"
#include "cage/ppo.hpp"

namespace cage {

// Chooses the defender action each step. The engine reference is const;
// controllers may inspect the world but never mutate it.
using BlueController = std::function<BlueAction(const Observation&, const Engine&)>;

// Runs fresh episodes and returns the original-channel score of each.
std::vector<double> run_episodes(Engine& engine, AdversaryKind adversary,
                                 int episode_len, int episodes,
                                 std::uint64_t base_seed,
                                 const BlueController& controller);

// Stochastic PPO defender: samples the actor, then expands abstract decoy
// actions greedily.
class PpoDefender {
 public:
  PpoDefender(ActorCritic ac, const Topology& topology, std::uint64_t sample_seed);

  struct Decision {
    ActionSample sample;
    BlueAction concrete;
  };
  Decision decide(const std::vector<double>& observation, const WorldState& world);

  BlueController controller();

  const ActorCritic& actor_critic() const { return ac_; }

 private:
  ActorCritic ac_;
  ActionSpace space_;
  DecoyRankTable ranks_;
  Rng rng_;
};

struct SeedResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::string checkpoint_path;
  std::vector<double> episode_original_scores;
};

struct TrainResult {
  std::vector<SeedResult> seeds;
};

// Trains every seed of the experiment (seeds run in parallel worker
// threads), writing per-seed learning curves, per-update stats and
// checkpoints under cfg.out_dir. A seed whose training state goes
// non-finite is recorded as failed; the others continue.
TrainResult train(const ExperimentConfig& cfg);

struct EvalEntry {
  AdversaryKind adversary = AdversaryKind::Bline;
  int length = 0;
  int episodes = 0;
  double mean_score = 0.0;
  double sigma = 0.0;
  bool insufficient_sample = false;  // fewer than two episodes
  std::vector<double> scores;        // original channel
};

// Mean and standard deviation of the original-channel score over fresh
// episodes with stochastic action sampling; never mutates the checkpoint.
EvalEntry evaluate(const std::string& checkpoint_path, const Topology& topology,
                   const EngineConfig& engine_config, AdversaryKind adversary,
                   int length, int episodes, std::uint64_t seed);

struct EvalReport {
  std::string name;
  std::vector<EvalEntry> entries;

  const EvalEntry* find(AdversaryKind adversary, int length) const;
};

// One eval entry per JSON file; the report step groups files by name.
void save_eval_entry(const std::string& path, const std::string& name,
                     const EvalEntry& entry);
std::vector<EvalReport> load_eval_reports(const std::string& dir);

// Score table: one row per report, score and sigma columns per
// (adversary, length); with two or more reports, Welch p-values against the
// first (reference) row are appended where both samples exist.
void write_report(std::ostream& os, const std::vector<EvalReport>& reports);

// Loads the actor/critic pair from a checkpoint; throws std::runtime_error
// when either network is missing or does not match the topology.
ActorCritic load_actor_critic(const std::string& checkpoint_path,
                              const Topology& topology);

}  // namespace cage
