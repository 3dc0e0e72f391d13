#include <benchmark/benchmark.h>

#include "cage/icm.hpp"
#include "cage/ppo.hpp"
#include "cage/rng.hpp"

using namespace cage;

namespace {

void BM_SelectAction(benchmark::State& state) {
  Rng rng(1);
  ActorCritic ac = ActorCritic::make(52, 53, {64, 64}, rng);
  std::vector<double> obs(52, 0.0);
  obs[3] = obs[17] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(select_action(ac, obs, rng));
}
BENCHMARK(BM_SelectAction);

RolloutBuffer synthetic_buffer(ActorCritic& ac, int n, Rng& rng) {
  RolloutBuffer buf;
  for (int i = 0; i < n; ++i) {
    RolloutBuffer::Record rec;
    rec.observation.assign(52, 0.0);
    rec.observation[rng.uniform_int(52)] = 1.0;
    rec.next_observation = rec.observation;
    const ActionSample s = select_action(ac, rec.observation, rng);
    rec.action = s.action;
    rec.log_prob = s.log_prob;
    rec.value = s.value;
    rec.reward = -0.1 * static_cast<double>(rng.uniform_int(10));
    rec.terminal = (i + 1) % 100 == 0;
    buf.add(std::move(rec));
  }
  return buf;
}

void BM_PpoUpdate2000(benchmark::State& state) {
  Rng rng(2);
  ActorCritic ac = ActorCritic::make(52, 53, {64, 64}, rng);
  PpoConfig cfg;
  cfg.minibatch_timesteps = 2000;
  for (auto _ : state) {
    state.PauseTiming();
    RolloutBuffer buf = synthetic_buffer(ac, 2000, rng);
    state.ResumeTiming();
    benchmark::DoNotOptimize(ppo_update(ac, buf, cfg));
  }
}
BENCHMARK(BM_PpoUpdate2000)->Unit(benchmark::kMillisecond);

void BM_IntrinsicReward(benchmark::State& state) {
  Rng rng(3);
  IcmNetworks nets = IcmNetworks::make(52, 53, IcmConfig{}, rng);
  std::vector<double> s(52, 0.0), s_next(52, 0.0);
  s[5] = s_next[9] = 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(intrinsic_reward(nets, s, 11, s_next, 0.01));
}
BENCHMARK(BM_IntrinsicReward);

void BM_IcmUpdate2000(benchmark::State& state) {
  Rng rng(4);
  ActorCritic ac = ActorCritic::make(52, 53, {64, 64}, rng);
  IcmNetworks nets = IcmNetworks::make(52, 53, IcmConfig{}, rng);
  RolloutBuffer buf = synthetic_buffer(ac, 2000, rng);
  const IcmBatch batch = IcmBatch::from_buffer(buf);
  for (auto _ : state)
    benchmark::DoNotOptimize(icm_update(nets, batch, IcmConfig{}));
}
BENCHMARK(BM_IcmUpdate2000)->Unit(benchmark::kMillisecond);

}  // namespace
