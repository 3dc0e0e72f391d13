#include "cage/icm.hpp"

#include <cmath>
#include <stdexcept>

namespace cage {

void IcmConfig::validate() const {
  if (external_factor < 0.0 || external_factor > 1.0 || internal_factor < 0.0 ||
      internal_factor > 1.0 ||
      std::abs(internal_factor - (1.0 - external_factor)) > 1e-12)
    throw std::invalid_argument(
        "reward factors must satisfy internal = 1 - external in [0, 1]");
  if (reward_scale < 0.0)
    throw std::invalid_argument("reward scale must be non-negative");
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("beta must lie in [0, 1]");
}

IcmNetworks IcmNetworks::make(int obs_dim, int action_count, const IcmConfig& cfg,
                              Rng& rng) {
  IcmNetworks nets;
  nets.embed = DenseNet::random_init({obs_dim, cfg.hidden_dim, cfg.feature_dim},
                                     OutputActivation::Linear, rng);
  nets.inverse = DenseNet::random_init(
      {2 * cfg.feature_dim, cfg.hidden_dim, action_count},
      OutputActivation::Softmax, rng);
  nets.forward = DenseNet::random_init(
      {cfg.feature_dim + action_count, cfg.hidden_dim, cfg.feature_dim},
      OutputActivation::Linear, rng);
  return nets;
}

double intrinsic_reward(const IcmNetworks& nets, const std::vector<double>& obs,
                        int action, const std::vector<double>& next_obs,
                        double eta) {
  const auto as_vector = [](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                             static_cast<Eigen::Index>(v.size()));
  };
  const Eigen::VectorXd feature = nets.embed.forward_one(as_vector(obs));
  const Eigen::VectorXd next_feature = nets.embed.forward_one(as_vector(next_obs));

  Eigen::VectorXd forward_in =
      Eigen::VectorXd::Zero(nets.feature_dim() + nets.action_count());
  forward_in.head(nets.feature_dim()) = feature;
  forward_in(nets.feature_dim() + action) = 1.0;
  const Eigen::VectorXd predicted = nets.forward.forward_one(forward_in);

  return 0.5 * eta * (predicted - next_feature).squaredNorm();
}

double combine_rewards(double extrinsic, double intrinsic, double external_factor,
                       double internal_factor) {
  if (external_factor < 0.0 || external_factor > 1.0 ||
      std::abs(internal_factor - (1.0 - external_factor)) > 1e-12)
    throw std::invalid_argument(
        "reward factors must satisfy internal = 1 - external in [0, 1]");
  return external_factor * extrinsic + internal_factor * intrinsic;
}

IcmBatch IcmBatch::from_buffer(const RolloutBuffer& buffer) {
  IcmBatch batch;
  const std::size_t n = buffer.size();
  if (n == 0) return batch;
  const auto obs_dim =
      static_cast<Eigen::Index>(buffer.records.front().observation.size());
  batch.observations.resize(obs_dim, static_cast<Eigen::Index>(n));
  batch.next_observations.resize(obs_dim, static_cast<Eigen::Index>(n));
  batch.actions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = buffer.records[i];
    batch.observations.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(rec.observation.data(), obs_dim);
    batch.next_observations.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(rec.next_observation.data(), obs_dim);
    batch.actions[i] = rec.action;
  }
  return batch;
}

IcmGradients icm_batch_gradients(const IcmNetworks& nets, const IcmBatch& batch,
                                 const IcmConfig& cfg) {
  cfg.validate();
  if (batch.size() == 0) throw std::logic_error("icm gradients on an empty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  const int fdim = nets.feature_dim();
  const int acts = nets.action_count();
  const double inv_n = 1.0 / static_cast<double>(n);

  ForwardCache embed_cache, next_embed_cache, inverse_cache, forward_cache;
  const Eigen::MatrixXd features = nets.embed.forward(batch.observations, &embed_cache);
  const Eigen::MatrixXd next_features =
      nets.embed.forward(batch.next_observations, &next_embed_cache);

  Eigen::MatrixXd inverse_in(2 * fdim, n);
  inverse_in.topRows(fdim) = features;
  inverse_in.bottomRows(fdim) = next_features;
  const Eigen::MatrixXd action_probs = nets.inverse.forward(inverse_in, &inverse_cache);

  Eigen::MatrixXd forward_in = Eigen::MatrixXd::Zero(fdim + acts, n);
  forward_in.topRows(fdim) = features;  // detached: forward loss stops here
  for (Eigen::Index i = 0; i < n; ++i)
    forward_in(fdim + batch.actions[i], i) = 1.0;
  const Eigen::MatrixXd predicted = nets.forward.forward(forward_in, &forward_cache);

  IcmStats stats;
  stats.transitions = batch.size();

  // inverse loss: cross-entropy of the taken action
  Eigen::MatrixXd inverse_grad = Eigen::MatrixXd::Zero(acts, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = action_probs(batch.actions[i], i);
    stats.inverse_loss -= std::log(p) * inv_n;
    inverse_grad(batch.actions[i], i) = -(1.0 - cfg.beta) * inv_n / p;
  }

  // forward loss: mean half squared feature error
  const Eigen::MatrixXd error = predicted - next_features;
  stats.forward_loss = 0.5 * error.squaredNorm() * inv_n;
  const Eigen::MatrixXd forward_grad = cfg.beta * inv_n * error;

  if (!std::isfinite(stats.inverse_loss) || !std::isfinite(stats.forward_loss))
    throw std::runtime_error("non-finite ICM loss");

  IcmGradients out;
  out.stats = stats;
  out.inverse = nets.inverse.backward(inverse_cache, inverse_grad);
  out.forward = nets.forward.backward(forward_cache, forward_grad);

  // the embedding learns from the inverse loss through both feature inputs
  out.embed = nets.embed.backward(embed_cache, out.inverse.input.topRows(fdim));
  out.embed.add(
      nets.embed.backward(next_embed_cache, out.inverse.input.bottomRows(fdim)));
  return out;
}

IcmStats icm_update(IcmNetworks& nets, const IcmBatch& batch, const IcmConfig& cfg) {
  IcmGradients grads = icm_batch_gradients(nets, batch, cfg);
  const AdamConfig adam = cfg.adam();
  if (cfg.beta < 1.0) nets.inverse.adam_step(grads.inverse, adam);
  if (cfg.beta > 0.0) nets.forward.adam_step(grads.forward, adam);
  if (cfg.beta < 1.0) nets.embed.adam_step(grads.embed, adam);
  return grads.stats;
}

}  // namespace cage
