#pragma once

#include <Eigen/Core>
#include <vector>

#include "cage/dense_net.hpp"
#include "cage/rollout.hpp"
#include "cage/rng.hpp"

namespace cage {

struct IcmConfig {
  double learning_rate = 0.001;  // alpha_i
  double beta = 0.2;             // forward/inverse loss weighting
  double reward_scale = 0.01;    // eta
  double external_factor = 0.9;  // eta_e
  double internal_factor = 0.1;  // eta_i = 1 - eta_e
  int feature_dim = 32;
  int hidden_dim = 64;
  double adam_beta1 = 0.0;
  double adam_beta2 = 0.990;

  // throws std::invalid_argument unless eta_i = 1 - eta_e with both in [0,1]
  void validate() const;
  AdamConfig adam() const {
    return AdamConfig{learning_rate, adam_beta1, adam_beta2, 1e-8};
  }
};

// Feature embedding plus the inverse and forward dynamics models. The
// embedding is trained through the inverse loss only; the forward model
// consumes detached features so prediction error cannot collapse them.
struct IcmNetworks {
  DenseNet embed;    // observation -> feature
  DenseNet inverse;  // [feature_t, feature_t+1] -> action distribution
  DenseNet forward;  // [feature_t, one-hot action] -> predicted feature_t+1

  int feature_dim() const { return embed.output_dim(); }
  int action_count() const { return inverse.output_dim(); }

  static IcmNetworks make(int obs_dim, int action_count, const IcmConfig& cfg,
                          Rng& rng);
};

// r_i = (eta / 2) * || predicted_feature - actual_feature ||^2; always
// non-negative, zero under perfect prediction.
double intrinsic_reward(const IcmNetworks& nets, const std::vector<double>& obs,
                        int action, const std::vector<double>& next_obs,
                        double eta);

// r = eta_e * extrinsic + eta_i * intrinsic. Throws std::invalid_argument
// when the factors do not satisfy eta_i = 1 - eta_e in [0, 1].
double combine_rewards(double extrinsic, double intrinsic, double external_factor,
                       double internal_factor);

struct IcmStats {
  double inverse_loss = 0.0;  // cross-entropy of the predicted action
  double forward_loss = 0.0;  // mean half squared feature error
  std::size_t transitions = 0;
};

// Transition batch in matrix form (columns are samples).
struct IcmBatch {
  Eigen::MatrixXd observations;
  Eigen::MatrixXd next_observations;
  std::vector<int> actions;

  static IcmBatch from_buffer(const RolloutBuffer& buffer);
  std::size_t size() const { return actions.size(); }
};

struct IcmGradients {
  Gradients embed;
  Gradients inverse;
  Gradients forward;
  IcmStats stats;
};

// Gradients of (1 - beta) * inverse_loss + beta * forward_loss at the
// current parameters. The forward loss consumes detached features, so the
// embedding gradient carries the inverse-loss path only.
IcmGradients icm_batch_gradients(const IcmNetworks& nets, const IcmBatch& batch,
                                 const IcmConfig& cfg);

// One optimizer step on (1 - beta) * inverse_loss + beta * forward_loss.
// Throws std::runtime_error on a non-finite loss.
IcmStats icm_update(IcmNetworks& nets, const IcmBatch& batch, const IcmConfig& cfg);

}  // namespace cage
