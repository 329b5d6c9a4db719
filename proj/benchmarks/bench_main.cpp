// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "mfpma/exact.hpp"
#include "mfpma/learn.hpp"
#include "mfpma/mirror.hpp"
#include "mfpma/sim.hpp"

namespace {

using namespace mfpma;

const GameSpec& torus() {
  static const GameSpec g = make_example_game(ExampleGameParams{});
  return g;
}

// Items processed are agent-steps.
void BM_SimulatorStep(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  Simulator sim(torus(), N, InitSpec::uniform_random(), 1);
  const Policy pi = Policy::uniform(5, 3);
  std::vector<Transition> buf;
  Vector mu;
  for (auto _ : state) {
    sim.step_into(pi, buf, mu);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * N);
}
BENCHMARK(BM_SimulatorStep)->Arg(50)->Arg(500)->Arg(5000);

void BM_CounterRng(benchmark::State& state) {
  const CounterRng rng(7);
  std::uint64_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.draw(static_cast<std::uint32_t>(t & 1023), t));
    ++t;
  }
}
BENCHMARK(BM_CounterRng);

void BM_SolveMirror(benchmark::State& state) {
  const Regularizer h = state.range(0) == 0 ? Regularizer::entropy(1.0)
                                            : Regularizer::quadratic(1.0);
  const double delta_h = state.range(1) ? 0.05 : kNoLevelConstraint;
  Vector q(3), c(3);
  q << 2.0, 0.5, 1.2;
  c << 0.2, 0.5, 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mirror(q, c, 10.0, h, delta_h).u.data());
  }
}
BENCHMARK(BM_SolveMirror)
    ->ArgNames({"quadratic", "level"})
    ->Args({0, 0})
    ->Args({0, 1})
    ->Args({1, 0})
    ->Args({1, 1});

void BM_ValueFunctions(benchmark::State& state) {
  const Regularizer h = Regularizer::entropy(1.0);
  const Policy pi = Policy::uniform(5, 3);
  const Vector mu = stable_population(torus(), pi);
  for (auto _ : state) {
    benchmark::DoNotOptimize(value_functions(torus(), pi, mu, h).Q.data());
  }
}
BENCHMARK(BM_ValueFunctions);

void BM_SolveExact(benchmark::State& state) {
  const Regularizer h = Regularizer::entropy(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_exact(torus(), h, 100.0).pi.probs().data());
  }
}
BENCHMARK(BM_SolveExact)->Unit(benchmark::kMillisecond);

// One CTD run of M = 200 updates with M_td = 12 at N = 500.
void BM_CtdBlock(benchmark::State& state) {
  const Regularizer h = Regularizer::entropy(1.0);
  const Policy pi = Policy::uniform(5, 3);
  CtdConfig cfg;
  cfg.M = 200;
  cfg.M_td = 12;
  cfg.t0 = 150.0;
  for (auto _ : state) {
    Simulator sim(torus(), 500, InitSpec::uniform_random(), 3);
    benchmark::DoNotOptimize(ctd_learn(sim, pi, 0, cfg, h).Q.data());
  }
  state.SetItemsProcessed(state.iterations() * 200 * 12 * 500);
}
BENCHMARK(BM_CtdBlock)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
