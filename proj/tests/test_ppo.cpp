#include <doctest.h>
#include <stdexcept>

#include <cmath>
#include <functional>

#include "cage/engine.hpp"
#include "cage/ppo.hpp"
#include "cage/rng.hpp"

using namespace cage;

namespace {

// independent discounted suffix-sum oracle for lambda = 1
std::vector<double> reward_to_go(const std::vector<double>& rewards,
                                 const std::vector<bool>& terminals,
                                 double gamma) {
  std::vector<double> g(rewards.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    if (terminals[i]) acc = 0.0;
    acc = rewards[i] + gamma * acc;
    g[i] = acc;
  }
  return g;
}

RolloutBuffer make_buffer(const std::vector<double>& rewards,
                          const std::vector<double>& values,
                          const std::vector<bool>& terminals) {
  RolloutBuffer buf;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    RolloutBuffer::Record r;
    r.observation = {0.0};
    r.next_observation = {0.0};
    r.reward = rewards[i];
    r.value = values[i];
    r.terminal = terminals[i];
    buf.add(std::move(r));
  }
  return buf;
}

}  // namespace

TEST_CASE("action space layout covers monitor plus four verbs per host") {
  const ActionSpace space(13);
  CHECK(space.size() == 53);
  CHECK(space.verb_of(0) == BlueVerb::Monitor);
  CHECK(space.verb_of(1) == BlueVerb::Analyse);
  CHECK(space.host_of(1) == 0);
  CHECK(space.verb_of(13) == BlueVerb::Analyse);
  CHECK(space.host_of(13) == 12);
  CHECK(space.verb_of(14) == BlueVerb::Remove);
  CHECK(space.verb_of(27) == BlueVerb::Restore);
  CHECK(space.verb_of(40) == BlueVerb::Decoy);
  CHECK(space.host_of(52) == 12);
  for (std::size_t i = 1; i < space.size(); ++i)
    CHECK(space.index_of(space.verb_of(i), space.host_of(i)) == i);
  CHECK_THROWS_AS(space.verb_of(53), std::out_of_range);
}

TEST_CASE("advantage hand cases") {
  SUBCASE("single step") {
    RolloutBuffer buf = make_buffer({-1.0}, {0.0}, {true});
    const AdvantageResult r = compute_advantages(buf, 0.99, 1.0);
    CHECK(r.advantages[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.returns[0] == doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("two-step discounted case") {
    RolloutBuffer buf = make_buffer({0.0, -10.0}, {0.0, 0.0}, {false, true});
    const AdvantageResult r = compute_advantages(buf, 0.99, 1.0);
    CHECK(r.advantages[0] == doctest::Approx(-9.9).epsilon(1e-12));
    CHECK(r.advantages[1] == doctest::Approx(-10.0).epsilon(1e-12));
  }
  SUBCASE("a perfect critic has zero advantage") {
    const std::vector<double> rewards = {1.0, 2.0, -1.0, 0.5};
    const std::vector<bool> terminals = {false, false, false, true};
    const std::vector<double> values =
        reward_to_go(rewards, terminals, 0.9);
    RolloutBuffer buf = make_buffer(rewards, values, terminals);
    const AdvantageResult r = compute_advantages(buf, 0.9, 1.0);
    for (double a : r.advantages) CHECK(std::abs(a) < 1e-12);
  }
}

TEST_CASE("advantages match the suffix-sum oracle on random sequences") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(60);
    std::vector<double> rewards(n), values(n);
    std::vector<bool> terminals(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      rewards[i] = rng.uniform(-10.0, 2.0);
      values[i] = rng.uniform(-5.0, 5.0);
      if (rng.bernoulli(0.1)) terminals[i] = true;
    }
    terminals[n - 1] = true;
    const double gamma = trial % 3 == 0 ? 1.0 : 0.99;

    RolloutBuffer buf = make_buffer(rewards, values, terminals);
    const AdvantageResult r = compute_advantages(buf, gamma, 1.0);
    const std::vector<double> g = reward_to_go(rewards, terminals, gamma);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(r.advantages[i] == doctest::Approx(g[i] - values[i]).epsilon(1e-10));
      CHECK(r.returns[i] == doctest::Approx(g[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("with gamma = 1 and zero values the advantage is the reward-to-go") {
  Rng rng(12);
  const std::size_t n = 40;
  std::vector<double> rewards(n);
  std::vector<bool> terminals(n, false);
  terminals[n - 1] = true;
  for (auto& r : rewards) r = rng.uniform(-3.0, 1.0);
  RolloutBuffer buf = make_buffer(rewards, std::vector<double>(n, 0.0), terminals);
  const AdvantageResult r = compute_advantages(buf, 1.0, 1.0);
  const std::vector<double> g = reward_to_go(rewards, terminals, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(r.advantages[i] == doctest::Approx(g[i]).epsilon(1e-12));
}

TEST_CASE("compute_advantages rejects an empty buffer") {
  RolloutBuffer buf;
  CHECK_THROWS_AS(compute_advantages(buf, 0.99, 1.0), std::logic_error);
}

TEST_CASE("an unterminated tail bootstraps from the supplied value") {
  // two rewards, no terminal: A_0 = r0 + g r1 + g^2 V_T - v0
  RolloutBuffer buf = make_buffer({1.0, 2.0}, {0.5, 0.25}, {false, false});
  const double gamma = 0.9, v_tail = 3.0;
  const AdvantageResult r = compute_advantages(buf, gamma, 1.0, v_tail);
  CHECK(r.advantages[1] ==
        doctest::Approx(2.0 + gamma * v_tail - 0.25).epsilon(1e-12));
  CHECK(r.advantages[0] ==
        doctest::Approx(1.0 + gamma * 2.0 + gamma * gamma * v_tail - 0.5)
            .epsilon(1e-12));
}

TEST_CASE("clip objective evaluates the published cases") {
  CHECK(clip_objective(1.0, 5.0, 0.2) == doctest::Approx(5.0));
  CHECK(clip_objective(1.5, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(clip_objective(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
}

TEST_CASE("the clipped objective never exceeds the trust-region bound") {
  Rng rng(13);
  const double eps = 0.2;
  for (int i = 0; i < 1000; ++i) {
    const double ratio = std::exp(rng.uniform(-2.0, 2.0));
    const double adv = rng.uniform(-10.0, 10.0);
    const double obj = clip_objective(ratio, adv, eps);
    // pessimistic bound: the objective cannot reward ratios beyond 1 + eps
    CHECK(obj <= (1.0 + eps) * std::abs(adv) + 1e-12);
    CHECK(obj <= std::max(ratio * adv, (1.0 + eps) * adv) + 1e-12);
    // within the trust region the magnitude is bounded as well
    if (ratio <= 1.0 + eps)
      CHECK(std::abs(obj) <= (1.0 + eps) * std::abs(adv) + 1e-12);
  }
}

TEST_CASE("combined loss composes its three terms") {
  CHECK(combined_loss(3.0, 2.0, 1.0, 0.0, 0.0) == doctest::Approx(3.0));
  CHECK(combined_loss(0.0, 2.0, 0.0, 0.5, 0.01) == doctest::Approx(-1.0));
  // uniform policy over A actions has entropy ln A
  const double ln53 = std::log(53.0);
  CHECK(combined_loss(0.0, 0.0, ln53, 0.5, 1.0) == doctest::Approx(ln53));
}

TEST_CASE("select_action samples the categorical actor head") {
  Rng init_rng(14);
  ActorCritic ac = ActorCritic::make(4, 3, {8}, init_rng);

  SUBCASE("near one-hot distribution always picks that action") {
    // drive the softmax to concentrate on action 1 via the output bias
    ac.actor.bias(1)(1) = 30.0;
    Rng rng(15);
    for (int i = 0; i < 50; ++i) {
      const ActionSample s = select_action(ac, {0.1, -0.2, 0.3, 0.0}, rng);
      CHECK(s.action == 1);
      CHECK(s.log_prob == doctest::Approx(0.0).epsilon(1e-6));
    }
  }
  SUBCASE("uniform logits give each action probability 1/A") {
    ActorCritic uniform = ActorCritic::make(4, 5, {8}, init_rng);
    for (auto l = 0u; l < uniform.actor.layer_count(); ++l)
      uniform.actor.weight(l).setZero();
    const Eigen::VectorXd p = uniform.actor.forward_one(Eigen::VectorXd::Zero(4));
    for (int i = 0; i < 5; ++i) CHECK(p(i) == doctest::Approx(0.2));
  }
  SUBCASE("empirical frequencies match probabilities within 3 sigma") {
    Rng rng(16);
    ActorCritic ac2 = ActorCritic::make(2, 4, {6}, rng);
    const std::vector<double> obs = {0.5, -0.5};
    const Eigen::VectorXd p = ac2.actor.forward_one(
        Eigen::Map<const Eigen::VectorXd>(obs.data(), 2));
    const int n = 10000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < n; ++i) counts[select_action(ac2, obs, rng).action]++;
    for (int a = 0; a < 4; ++a) {
      const double expectation = n * p(a);
      const double sigma = std::sqrt(n * p(a) * (1.0 - p(a)));
      CHECK(std::abs(counts[a] - expectation) <= 3.0 * sigma + 1.0);
    }
  }
}

TEST_CASE("select_action aborts on non-finite logits") {
  Rng rng(17);
  ActorCritic ac = ActorCritic::make(2, 3, {4}, rng);
  ac.actor.weight(0)(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(select_action(ac, {1.0, 1.0}, rng));
}

TEST_CASE("decoy rank table orders by blocked exploit options") {
  const Topology t = build_cage2_topology();
  const DecoyRankTable table(t);

  // Enterprise0 runs sshd: femitter, tomcat, smss and svchost all outrank it
  const auto& ranks = table.ranking(5);
  REQUIRE(ranks.size() == 6);  // seven kinds minus sshd (running)
  CHECK(ranks[0] == DecoyKind::Femitter);
  CHECK(ranks[1] == DecoyKind::Tomcat);
  CHECK(ranks[2] == DecoyKind::Smss);
  CHECK(ranks[3] == DecoyKind::Svchost);

  // Enterprise1 runs sshd + tomcat: only femitter outranks tomcat
  CHECK(table.ranking(6).front() == DecoyKind::Femitter);
}

TEST_CASE("greedy decoy expansion walks the rank table") {
  const Topology t = build_cage2_topology();
  const DecoyRankTable table(t);
  HostState state;

  SUBCASE("empty decoy set gets the top-ranked decoy") {
    const BlueAction a = greedy_decoy_expand(5, table, state);
    CHECK(a.verb == BlueVerb::Decoy);
    CHECK(a.host == 5);
    CHECK(a.decoy == DecoyKind::Femitter);
  }
  SUBCASE("a placed top decoy falls through to the second") {
    state.add_decoy(DecoyKind::Femitter);
    CHECK(greedy_decoy_expand(5, table, state).decoy == DecoyKind::Tomcat);
  }
  SUBCASE("exhausted candidates fall back to monitor") {
    for (DecoyKind d : table.ranking(5)) state.add_decoy(d);
    CHECK(greedy_decoy_expand(5, table, state).verb == BlueVerb::Monitor);
  }
}

TEST_CASE("every expanded action is valid for every index and decoy state") {
  const Topology t = build_cage2_topology();
  const ActionSpace space(t.host_count());
  const DecoyRankTable table(t);
  Engine engine(t, {});
  engine.reset(AdversaryKind::Sleep, 10, 1);

  Rng rng(60);
  for (int trial = 0; trial < 50; ++trial) {
    WorldState w = engine.world();
    // scatter random decoys, respecting the placement rule
    for (const HostSpec& h : t.hosts())
      for (DecoyKind d : table.ranking(h.id))
        if (rng.bernoulli(0.4)) w.hosts[h.id].add_decoy(d);

    for (std::size_t index = 0; index < space.size(); ++index) {
      const BlueAction action = expand_action(space, index, table, w);
      if (action.verb != BlueVerb::Monitor) {
        CHECK(action.host >= 0);
        CHECK(action.host < static_cast<int>(t.host_count()));
      }
      if (action.verb == BlueVerb::Decoy) {
        // the expansion never duplicates a running service or placed decoy
        CHECK_FALSE(w.hosts[action.host].has_decoy(action.decoy));
        CHECK_FALSE(t.host(action.host).runs_service(service_of(action.decoy)));
      }
      // the engine accepts it outright
      WorldState scratch = w;
      CHECK_NOTHROW(engine.apply_blue(scratch, action));
    }
  }
}

TEST_CASE("expand_action passes non-decoy verbs through") {
  const Topology t = build_cage2_topology();
  const ActionSpace space(t.host_count());
  const DecoyRankTable table(t);
  WorldState w;
  w.hosts.assign(t.host_count(), HostState{});

  CHECK(expand_action(space, 0, table, w).verb == BlueVerb::Monitor);
  const BlueAction restore = expand_action(space, space.index_of(BlueVerb::Restore, 7),
                                           table, w);
  CHECK(restore.verb == BlueVerb::Restore);
  CHECK(restore.host == 7);
  const BlueAction decoy = expand_action(space, space.index_of(BlueVerb::Decoy, 5),
                                         table, w);
  CHECK(decoy.verb == BlueVerb::Decoy);
  CHECK(decoy.decoy == DecoyKind::Femitter);
}

namespace {

// forward-only oracle for the actor objective: the negated clipped
// surrogate plus the entropy bonus, advantages held constant
double actor_loss_oracle(const DenseNet& actor, const PpoBatch& batch,
                         const Eigen::VectorXd& advantages, const PpoConfig& cfg) {
  const Eigen::MatrixXd probs = actor.forward(batch.observations);
  const auto n = static_cast<double>(batch.size());
  double surrogate = 0.0, entropy = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double log_p = std::log(probs(batch.actions[i], i));
    const double ratio = std::exp(log_p - batch.old_log_probs(i));
    surrogate += clip_objective(ratio, advantages(i), cfg.clip);
    for (Eigen::Index j = 0; j < probs.rows(); ++j)
      entropy -= probs(j, i) * std::log(probs(j, i));
  }
  return -surrogate / n - cfg.entropy_coeff * entropy / n;
}

double critic_loss_oracle(const DenseNet& critic, const PpoBatch& batch,
                          const PpoConfig& cfg) {
  const Eigen::MatrixXd values = critic.forward(batch.observations);
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double err = values(0, i) - batch.targets(i);
    sum += err * err;
  }
  return cfg.critic_coeff * sum / static_cast<double>(batch.size());
}

// central finite differences over every parameter of `net`
double fd_relative_error(DenseNet net, const Gradients& analytic,
                         const std::function<double(const DenseNet&)>& loss,
                         double h = 1e-6) {
  double diff_sq = 0.0, a_sq = 0.0, f_sq = 0.0;
  const auto probe = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const double up = loss(net);
    param = saved - h;
    const double down = loss(net);
    param = saved;
    const double fd = (up - down) / (2.0 * h);
    diff_sq += (grad - fd) * (grad - fd);
    a_sq += grad * grad;
    f_sq += fd * fd;
  };
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd& w = net.weight(l);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) probe(w(i, j), analytic.weights[l](i, j));
    Eigen::VectorXd& b = net.bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) probe(b(i), analytic.biases[l](i));
  }
  return std::sqrt(diff_sq) / std::max({std::sqrt(a_sq), std::sqrt(f_sq), 1e-12});
}

}  // namespace

TEST_CASE("full combined-loss gradients match finite differences") {
  Rng rng(55);
  ActorCritic ac = ActorCritic::make(3, 4, {6}, rng);

  PpoBatch batch;
  const std::size_t n = 12;
  batch.observations.resize(3, n);
  batch.actions.resize(n);
  batch.old_log_probs.resize(n);
  batch.targets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    batch.observations.col(i) = Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                                rng.uniform(-1, 1));
    batch.actions[i] = static_cast<int>(rng.uniform_int(4));
    const Eigen::VectorXd p = ac.actor.forward_one(batch.observations.col(i));
    // ratio offsets chosen away from the clip kinks at 1 +/- 0.2 so the
    // finite differences stay in a smooth region; the large offsets land in
    // the clipped (zero-gradient) branch
    const double offset = (i % 3 == 0) ? 0.5 : 0.04;
    batch.old_log_probs(i) =
        std::log(p(batch.actions[i])) + (rng.bernoulli(0.5) ? offset : -offset);
    batch.targets(i) = rng.uniform(-2.0, 2.0);
  }

  PpoConfig cfg;
  const PpoGradients grads = ppo_batch_gradients(ac, batch, cfg);

  // advantages are a constant of the unperturbed critic for the actor path
  const Eigen::MatrixXd values = ac.critic.forward(batch.observations);
  Eigen::VectorXd advantages(n);
  for (std::size_t i = 0; i < n; ++i) advantages(i) = batch.targets(i) - values(0, i);

  const double actor_err = fd_relative_error(
      ac.actor, grads.actor,
      [&](const DenseNet& net) { return actor_loss_oracle(net, batch, advantages, cfg); });
  CHECK(actor_err <= 1e-4);

  const double critic_err = fd_relative_error(
      ac.critic, grads.critic,
      [&](const DenseNet& net) { return critic_loss_oracle(net, batch, cfg); });
  CHECK(critic_err <= 1e-4);
}

TEST_CASE("ppo update is stationary at zero advantage with a perfect critic") {
  Rng rng(18);
  ActorCritic ac = ActorCritic::make(3, 4, {6}, rng);
  // zero-weight critic predicts 0 for every state; all-zero rewards make
  // every return 0, so the normalized targets are 0 and advantages vanish
  for (auto l = 0u; l < ac.critic.layer_count(); ++l) ac.critic.weight(l).setZero();
  const ActorCritic before = ac;

  RolloutBuffer buf;
  Rng data_rng(19);
  for (int i = 0; i < 50; ++i) {
    RolloutBuffer::Record r;
    r.observation = {data_rng.uniform01(), data_rng.uniform01(), 0.5};
    r.next_observation = r.observation;
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.observation.data(), 3);
    const Eigen::VectorXd p = ac.actor.forward_one(x);
    r.action = static_cast<int>(i) % 4;
    r.log_prob = std::log(p(r.action));
    r.reward = 0.0;
    r.value = 0.0;
    r.terminal = (i + 1) % 10 == 0;
    buf.add(std::move(r));
  }
  PpoConfig cfg;
  cfg.epochs = 3;
  cfg.entropy_coeff = 0.0;  // isolate the surrogate and value terms
  ppo_update(ac, buf, cfg);

  double max_delta = 0.0;
  for (auto l = 0u; l < ac.actor.layer_count(); ++l) {
    max_delta = std::max(max_delta,
                         (ac.actor.weight(l) - before.actor.weight(l)).cwiseAbs().maxCoeff());
    max_delta = std::max(max_delta,
                         (ac.critic.weight(l) - before.critic.weight(l)).cwiseAbs().maxCoeff());
  }
  CHECK(max_delta < 1e-6);
}

TEST_CASE("a positive-advantage action becomes more likely") {
  Rng rng(20);
  ActorCritic ac = ActorCritic::make(2, 2, {6}, rng);
  // zero critic so the stored advantage keeps its positive sign
  for (auto l = 0u; l < ac.critic.layer_count(); ++l) ac.critic.weight(l).setZero();
  const std::vector<double> obs = {1.0, -1.0};
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(obs.data(), 2);
  const double p_before = ac.actor.forward_one(x)(0);

  RolloutBuffer buf;
  for (int i = 0; i < 32; ++i) {
    RolloutBuffer::Record r;
    r.observation = obs;
    r.next_observation = obs;
    r.action = 0;
    r.log_prob = std::log(p_before);
    r.reward = 1.0;  // single-step episodes with reward 1 and value 0
    r.value = 0.0;
    r.terminal = true;
    buf.add(std::move(r));
  }
  PpoConfig cfg;
  cfg.epochs = 4;
  cfg.entropy_coeff = 0.0;
  cfg.normalize_returns = false;  // keep the raw positive advantage
  ppo_update(ac, buf, cfg);

  CHECK(ac.actor.forward_one(x)(0) > p_before);
}

TEST_CASE("ppo update is deterministic for identical inputs") {
  const auto run = []() {
    Rng rng(21);
    ActorCritic ac = ActorCritic::make(3, 3, {8}, rng);
    RolloutBuffer buf;
    Rng data_rng(22);
    for (int i = 0; i < 64; ++i) {
      RolloutBuffer::Record r;
      r.observation = {data_rng.uniform01(), data_rng.uniform01(), data_rng.uniform01()};
      r.next_observation = r.observation;
      const Eigen::VectorXd x =
          Eigen::Map<const Eigen::VectorXd>(r.observation.data(), 3);
      r.action = static_cast<int>(data_rng.uniform_int(3));
      r.log_prob = std::log(ac.actor.forward_one(x)(r.action));
      r.reward = data_rng.uniform(-2.0, 0.0);
      r.value = ac.critic.forward_one(x)(0);
      r.terminal = (i + 1) % 16 == 0;
      buf.add(std::move(r));
    }
    ppo_update(ac, buf, PpoConfig{.epochs = 2});
    return ac;
  };
  const ActorCritic a = run();
  const ActorCritic b = run();
  CHECK(a.actor == b.actor);
  CHECK(a.critic == b.critic);
}

TEST_CASE("ppo update clears the buffer") {
  Rng rng(23);
  ActorCritic ac = ActorCritic::make(2, 2, {4}, rng);
  RolloutBuffer buf;
  RolloutBuffer::Record r;
  r.observation = {0.0, 1.0};
  r.next_observation = {0.0, 1.0};
  r.action = 0;
  r.log_prob = std::log(ac.actor.forward_one(Eigen::Vector2d(0.0, 1.0))(0));
  r.reward = -1.0;
  r.value = 0.0;
  r.terminal = true;
  buf.add(r);
  ppo_update(ac, buf, PpoConfig{.epochs = 1});
  CHECK(buf.empty());
}
