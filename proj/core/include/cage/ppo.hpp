#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "cage/actions.hpp"
#include "cage/dense_net.hpp"
#include "cage/engine.hpp"
#include "cage/rollout.hpp"
#include "cage/rng.hpp"
#include "cage/topology.hpp"

namespace cage {

struct PpoConfig {
  double learning_rate = 0.002;
  int epochs = 6;
  int minibatch_timesteps = 20000;
  double discount = 0.99;
  double gae_lambda = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.990;
  double clip = 0.2;
  double critic_coeff = 0.5;   // c1
  double entropy_coeff = 0.01; // c2
  // standardize the discounted returns before forming advantages and value
  // targets; keeps the update scale independent of the shaping scheme
  bool normalize_returns = true;
  std::vector<int> hidden_dims = {64, 64};

  AdamConfig adam() const {
    return AdamConfig{learning_rate, beta1, beta2, 1e-8};
  }
};

// The defender's flattened abstract action set:
// {Monitor} + {Analyse, Remove, Restore, Decoy} x hosts. The decoy action
// carries no kind; greedy_decoy_expand resolves it against the rank table.
class ActionSpace {
 public:
  explicit ActionSpace(std::size_t host_count) : host_count_(host_count) {}

  std::size_t size() const { return 1 + 4 * host_count_; }
  std::size_t host_count() const { return host_count_; }

  // index 0 is Monitor, then verb-major blocks of host_count entries
  BlueVerb verb_of(std::size_t index) const;
  int host_of(std::size_t index) const;
  std::size_t index_of(BlueVerb verb, int host) const;

 private:
  std::size_t host_count_;
};

// Per-host decoy preference, ordered by how many of the host's real exploit
// options the decoy outranks under the red exploit preference (ties broken
// by that same preference). Fixed once the topology is loaded.
class DecoyRankTable {
 public:
  explicit DecoyRankTable(const Topology& t);

  const std::vector<DecoyKind>& ranking(int host) const { return ranks_[host]; }

 private:
  std::vector<std::vector<DecoyKind>> ranks_;
};

// Resolves an abstract decoy on `host` to the highest-ranked decoy not yet
// placed there; falls back to Monitor when every candidate is placed.
BlueAction greedy_decoy_expand(int host, const DecoyRankTable& table,
                               const HostState& host_state);

// Maps a flat action index to the concrete BlueAction, expanding decoys.
BlueAction expand_action(const ActionSpace& space, std::size_t action_index,
                         const DecoyRankTable& table, const WorldState& world);

struct ActionSample {
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
};

struct ActorCritic {
  DenseNet actor;   // softmax over the flattened action set
  DenseNet critic;  // scalar state value

  static ActorCritic make(int obs_dim, int action_count,
                          const std::vector<int>& hidden_dims, Rng& rng);
};

// Samples from the categorical actor distribution; returns the sampled
// index, its log-probability and the critic value. Throws
// std::runtime_error on non-finite logits.
ActionSample select_action(const ActorCritic& ac,
                           const std::vector<double>& observation, Rng& rng);

// min(ratio * advantage, clip(ratio, 1-eps, 1+eps) * advantage); the caller
// negates and averages.
double clip_objective(double ratio, double advantage, double clip_epsilon);

// L = clip_term - c1 * value_loss + c2 * entropy (to be maximized)
double combined_loss(double clip_term, double value_loss, double entropy,
                     double critic_coeff, double entropy_coeff);

struct PpoStats {
  double loss = 0.0;        // combined loss, last epoch
  double clip_term = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;   // mean(old_log_prob - new_log_prob)
  double clip_fraction = 0.0;
  std::size_t timesteps = 0;
};

// One full batch in matrix form, value targets already prepared.
struct PpoBatch {
  Eigen::MatrixXd observations;  // obs_dim x n
  std::vector<int> actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd targets;

  std::size_t size() const { return actions.size(); }
};

struct PpoGradients {
  Gradients actor;
  Gradients critic;
  PpoStats stats;
};

// One full-batch gradient evaluation at the current parameters. The
// advantage (target - value) is treated as a constant w.r.t. both networks,
// so the actor gradient covers the clipped surrogate plus the entropy bonus
// and the critic gradient covers the weighted value loss alone.
PpoGradients ppo_batch_gradients(const ActorCritic& ac, const PpoBatch& batch,
                                 const PpoConfig& cfg);

// K epochs of full-batch updates on the clipped surrogate with the stored
// log-probabilities as the old policy; clears the buffer. Throws
// std::runtime_error when the loss goes non-finite.
PpoStats ppo_update(ActorCritic& ac, RolloutBuffer& buffer, const PpoConfig& cfg);

}  // namespace cage
