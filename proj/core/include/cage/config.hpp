#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cage/engine.hpp"
#include "cage/icm.hpp"
#include "cage/ppo.hpp"
#include "cage/scoring.hpp"

namespace cage {

// Full description of one experiment: who attacks, how rewards are shaped,
// how long to train, and how to evaluate. Defaults mirror the full-scale
// protocol (15 seeds, 75k episodes, 1000-episode evaluations at 30/50/100).
struct ExperimentConfig {
  AdversaryKind adversary = AdversaryKind::Bline;
  ShapingScheme shaping = ShapingScheme::Baseline;
  bool icm_enabled = false;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  int train_episodes = 75000;
  int episode_len = 100;
  int eval_episodes = 1000;
  std::vector<int> eval_lengths = {30, 50, 100};
  int checkpoint_every = 10000;
  // 100-episode moving average used for learning-curve records
  int curve_window = 100;
  std::string out_dir = "runs/experiment";
  std::string topology_file;  // empty: built-in CAGE-2 topology

  EngineConfig engine;
  PpoConfig ppo;
  IcmConfig icm;

  void validate() const;  // throws std::invalid_argument
};

// CI-speed preset: 3 seeds, 2000 episodes, 100-episode evaluations and a
// small enough batch that updates happen every 20 episodes.
ExperimentConfig desk_preset();
// The full-scale protocol: 15 seeds, 75k episodes, 20k-timestep batches.
ExperimentConfig full_preset();
ExperimentConfig preset_by_name(const std::string& name);

std::string to_json_string(const ExperimentConfig& cfg);
ExperimentConfig config_from_json_string(const std::string& text);
void save_config(const std::string& path, const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

}  // namespace cage
