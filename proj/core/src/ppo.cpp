#include "cage/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cage/adversaries.hpp"

namespace cage {

AdvantageResult compute_advantages(const RolloutBuffer& buffer, double gamma,
                                   double lambda, double tail_bootstrap) {
  if (buffer.empty())
    throw std::logic_error("compute_advantages on an empty buffer");
  const std::size_t n = buffer.size();
  AdvantageResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);

  double gae = 0.0;
  double next_value = tail_bootstrap;
  for (std::size_t i = n; i-- > 0;) {
    const auto& rec = buffer.records[i];
    if (rec.terminal) {
      next_value = 0.0;  // true episode end, no bootstrap
      gae = 0.0;
    }
    const double delta = rec.reward + gamma * next_value - rec.value;
    gae = delta + gamma * lambda * gae;
    out.advantages[i] = gae;
    out.returns[i] = gae + rec.value;
    next_value = rec.value;
  }
  return out;
}

BlueVerb ActionSpace::verb_of(std::size_t index) const {
  if (index == 0) return BlueVerb::Monitor;
  switch ((index - 1) / host_count_) {
    case 0: return BlueVerb::Analyse;
    case 1: return BlueVerb::Remove;
    case 2: return BlueVerb::Restore;
    case 3: return BlueVerb::Decoy;
  }
  throw std::out_of_range("action index out of range");
}

int ActionSpace::host_of(std::size_t index) const {
  if (index == 0 || index >= size())
    throw std::out_of_range("action index has no host");
  return static_cast<int>((index - 1) % host_count_);
}

std::size_t ActionSpace::index_of(BlueVerb verb, int host) const {
  switch (verb) {
    case BlueVerb::Monitor: return 0;
    case BlueVerb::Analyse: return 1 + 0 * host_count_ + host;
    case BlueVerb::Remove: return 1 + 1 * host_count_ + host;
    case BlueVerb::Restore: return 1 + 2 * host_count_ + host;
    case BlueVerb::Decoy: return 1 + 3 * host_count_ + host;
  }
  throw std::out_of_range("unknown verb");
}

DecoyRankTable::DecoyRankTable(const Topology& t) {
  ranks_.resize(t.host_count());
  for (const HostSpec& h : t.hosts()) {
    std::vector<DecoyKind> candidates;
    for (std::size_t i = 0; i < kDecoyKindCount; ++i) {
      const auto d = static_cast<DecoyKind>(i);
      if (!h.runs_service(service_of(d))) candidates.push_back(d);
    }
    const auto blocked = [&](DecoyKind d) {
      int count = 0;
      for (ServiceKind s : h.services)
        if (exploit_priority(s) < exploit_priority(service_of(d))) ++count;
      return count;
    };
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](DecoyKind a, DecoyKind b) {
                       const int ba = blocked(a), bb = blocked(b);
                       if (ba != bb) return ba > bb;
                       return exploit_priority(service_of(a)) >
                              exploit_priority(service_of(b));
                     });
    ranks_[h.id] = std::move(candidates);
  }
}

BlueAction greedy_decoy_expand(int host, const DecoyRankTable& table,
                               const HostState& host_state) {
  for (DecoyKind d : table.ranking(host))
    if (!host_state.has_decoy(d)) return BlueAction::place_decoy(host, d);
  return BlueAction::monitor();  // every candidate already placed
}

BlueAction expand_action(const ActionSpace& space, std::size_t action_index,
                         const DecoyRankTable& table, const WorldState& world) {
  const BlueVerb verb = space.verb_of(action_index);
  if (verb == BlueVerb::Monitor) return BlueAction::monitor();
  const int host = space.host_of(action_index);
  if (verb == BlueVerb::Decoy)
    return greedy_decoy_expand(host, table, world.hosts[host]);
  return BlueAction{verb, host, DecoyKind::Apache};
}

ActorCritic ActorCritic::make(int obs_dim, int action_count,
                              const std::vector<int>& hidden_dims, Rng& rng) {
  std::vector<int> actor_dims{obs_dim};
  actor_dims.insert(actor_dims.end(), hidden_dims.begin(), hidden_dims.end());
  actor_dims.push_back(action_count);
  std::vector<int> critic_dims{obs_dim};
  critic_dims.insert(critic_dims.end(), hidden_dims.begin(), hidden_dims.end());
  critic_dims.push_back(1);
  ActorCritic ac;
  ac.actor = DenseNet::random_init(actor_dims, OutputActivation::Softmax, rng);
  ac.critic = DenseNet::random_init(critic_dims, OutputActivation::Linear, rng);
  return ac;
}

ActionSample select_action(const ActorCritic& ac,
                           const std::vector<double>& observation, Rng& rng) {
  const Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(observation.data(),
                                        static_cast<Eigen::Index>(observation.size()));
  const Eigen::VectorXd probs = ac.actor.forward_one(x);
  if (!probs.allFinite())
    throw std::runtime_error("non-finite action distribution");

  // inverse-CDF draw; the final bucket absorbs rounding slack
  const double u = rng.uniform01();
  double cumulative = 0.0;
  int action = static_cast<int>(probs.size()) - 1;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    cumulative += probs(i);
    if (u < cumulative) {
      action = static_cast<int>(i);
      break;
    }
  }

  ActionSample s;
  s.action = action;
  s.log_prob = std::log(probs(action));
  s.value = ac.critic.forward_one(x)(0);
  return s;
}

double clip_objective(double ratio, double advantage, double clip_epsilon) {
  const double clipped =
      std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double combined_loss(double clip_term, double value_loss, double entropy,
                     double critic_coeff, double entropy_coeff) {
  return clip_term - critic_coeff * value_loss + entropy_coeff * entropy;
}

PpoGradients ppo_batch_gradients(const ActorCritic& ac, const PpoBatch& batch,
                                 const PpoConfig& cfg) {
  const std::size_t n = batch.size();
  if (n == 0) throw std::logic_error("ppo_batch_gradients on an empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);

  ForwardCache actor_cache, critic_cache;
  const Eigen::MatrixXd probs = ac.actor.forward(batch.observations, &actor_cache);
  const Eigen::MatrixXd values = ac.critic.forward(batch.observations, &critic_cache);

  Eigen::MatrixXd actor_grad = Eigen::MatrixXd::Zero(probs.rows(), probs.cols());
  Eigen::MatrixXd critic_grad = Eigen::MatrixXd::Zero(1, n);

  PpoStats stats;
  stats.timesteps = n;
  double clip_sum = 0.0, value_sum = 0.0, entropy_sum = 0.0, kl_sum = 0.0;
  std::size_t clipped_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int a = batch.actions[i];
    const double p_a = probs(a, i);
    const double log_p = std::log(p_a);
    const double ratio = std::exp(log_p - batch.old_log_probs(i));
    const double advantage = batch.targets(i) - values(0, i);

    const double unclipped = ratio * advantage;
    const double clipped =
        std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * advantage;
    clip_sum += std::min(unclipped, clipped);
    if (unclipped <= clipped) {
      // gradient flows through the unclipped branch:
      // d(ratio * A)/dp_a = A * ratio / p_a
      actor_grad(a, i) -= advantage * ratio / p_a * inv_n;
    } else {
      ++clipped_count;
    }

    // entropy bonus: dS/dp_j = -(log p_j + 1)
    double entropy_i = 0.0;
    for (Eigen::Index j = 0; j < probs.rows(); ++j) {
      const double p = probs(j, i);
      const double log_pj = std::log(p);
      entropy_i -= p * log_pj;
      actor_grad(j, i) += cfg.entropy_coeff * (log_pj + 1.0) * inv_n;
    }
    entropy_sum += entropy_i;

    const double value_error = values(0, i) - batch.targets(i);
    value_sum += value_error * value_error;
    critic_grad(0, i) = cfg.critic_coeff * 2.0 * value_error * inv_n;

    kl_sum += batch.old_log_probs(i) - log_p;
  }

  stats.clip_term = clip_sum * inv_n;
  stats.value_loss = value_sum * inv_n;
  stats.entropy = entropy_sum * inv_n;
  stats.approx_kl = kl_sum * inv_n;
  stats.clip_fraction = static_cast<double>(clipped_count) * inv_n;
  stats.loss = combined_loss(stats.clip_term, stats.value_loss, stats.entropy,
                             cfg.critic_coeff, cfg.entropy_coeff);
  if (!std::isfinite(stats.loss)) throw std::runtime_error("non-finite PPO loss");

  PpoGradients out;
  out.actor = ac.actor.backward(actor_cache, actor_grad);
  out.critic = ac.critic.backward(critic_cache, critic_grad);
  out.stats = stats;
  return out;
}

PpoStats ppo_update(ActorCritic& ac, RolloutBuffer& buffer, const PpoConfig& cfg) {
  if (buffer.empty()) throw std::logic_error("ppo_update on an empty buffer");
  const std::size_t n = buffer.size();
  const std::size_t obs_dim = buffer.records.front().observation.size();

  PpoBatch batch;
  batch.observations.resize(obs_dim, n);
  batch.actions.resize(n);
  batch.old_log_probs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = buffer.records[i];
    batch.observations.col(i) = Eigen::Map<const Eigen::VectorXd>(
        rec.observation.data(), static_cast<Eigen::Index>(obs_dim));
    batch.actions[i] = rec.action;
    batch.old_log_probs(i) = rec.log_prob;
  }

  const AdvantageResult adv = compute_advantages(buffer, cfg.discount, cfg.gae_lambda);
  batch.targets = Eigen::Map<const Eigen::VectorXd>(adv.returns.data(),
                                                    static_cast<Eigen::Index>(n));
  if (cfg.normalize_returns) {
    const double mean = batch.targets.mean();
    const double sd = std::sqrt((batch.targets.array() - mean).square().sum() /
                                static_cast<double>(n));
    batch.targets = (batch.targets.array() - mean) / (sd + 1e-7);
  }

  const AdamConfig adam = cfg.adam();
  PpoStats stats;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    PpoGradients grads = ppo_batch_gradients(ac, batch, cfg);
    stats = grads.stats;
    ac.actor.adam_step(grads.actor, adam);
    ac.critic.adam_step(grads.critic, adam);
  }

  buffer.clear();
  return stats;
}

}  // namespace cage
