#include <benchmark/benchmark.h>

#include "cage/engine.hpp"
#include "cage/rng.hpp"

using namespace cage;

namespace {

BlueAction cycled_blue(int step) {
  switch (step % 4) {
    case 0: return BlueAction::monitor();
    case 1: return BlueAction::analyse(step % 13);
    case 2: return BlueAction::place_decoy(5 + step % 3, DecoyKind::Femitter);
    default: return BlueAction::remove(step % 13);
  }
}

void BM_EngineReset(benchmark::State& state) {
  Engine engine(build_cage2_topology(), {});
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(engine.reset(AdversaryKind::Bline, 100, seed++));
}
BENCHMARK(BM_EngineReset);

void BM_EngineStepBline(benchmark::State& state) {
  Engine engine(build_cage2_topology(), {});
  engine.reset(AdversaryKind::Bline, 100, 1);
  int step = 0;
  for (auto _ : state) {
    if (engine.done()) engine.reset(AdversaryKind::Bline, 100, ++step);
    benchmark::DoNotOptimize(engine.step(cycled_blue(step++)));
  }
}
BENCHMARK(BM_EngineStepBline);

void BM_EngineStepMeander(benchmark::State& state) {
  Engine engine(build_cage2_topology(), {});
  engine.reset(AdversaryKind::Meander, 100, 1);
  int step = 0;
  for (auto _ : state) {
    if (engine.done()) engine.reset(AdversaryKind::Meander, 100, ++step);
    benchmark::DoNotOptimize(engine.step(cycled_blue(step++)));
  }
}
BENCHMARK(BM_EngineStepMeander);

void BM_EpisodeBline100(benchmark::State& state) {
  Engine engine(build_cage2_topology(), {});
  std::uint64_t seed = 0;
  for (auto _ : state) {
    engine.reset(AdversaryKind::Bline, 100, seed++);
    int step = 0;
    double total = 0.0;
    while (!engine.done()) total += engine.step(cycled_blue(step++)).reward.original;
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_EpisodeBline100);

}  // namespace
