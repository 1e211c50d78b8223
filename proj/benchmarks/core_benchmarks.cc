// Copyright 2026 The qkdsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "qkdsim/bb84_protocol.h"
#include "qkdsim/cv_channel.h"
#include "qkdsim/decoy_source.h"
#include "qkdsim/qubit.h"
#include "qkdsim/rng.h"

namespace qkdsim {
namespace {

void BM_RngDraw(benchmark::State& state) {
  RngStream rng(1, 0, "bench");
  for (auto _ : state) benchmark::DoNotOptimize(rng());
}
BENCHMARK(BM_RngDraw);

void BM_RngGaussian(benchmark::State& state) {
  RngStream rng(1, 0, "bench");
  for (auto _ : state) benchmark::DoNotOptimize(rng.gaussian(0.0, 1.0));
}
BENCHMARK(BM_RngGaussian);

void BM_RngPoisson(benchmark::State& state) {
  RngStream rng(1, 0, "bench");
  const double mean = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(rng.poisson(mean));
}
BENCHMARK(BM_RngPoisson)->Arg(5)->Arg(10)->Arg(300);

void BM_MeasureAndResend(benchmark::State& state) {
  RngStream rng(1, 0, "bench");
  const QubitState signal = bb84_state(0, BasisLabel::kZ);
  const MeasBasis basis = MeasBasis::breidbart();
  for (auto _ : state)
    benchmark::DoNotOptimize(measure_and_resend(signal, basis, rng));
}
BENCHMARK(BM_MeasureAndResend);

void BM_CvHeterodyneSample(benchmark::State& state) {
  CvChannelParams params;
  params.transmittance = 0.1;
  params.modulation_variance = 25.0;
  RngStream rng(1, 0, "bench");
  for (auto _ : state) {
    const double m = rng.gaussian(0.0, 5.0);
    benchmark::DoNotOptimize(sample_heterodyne_resend(m, params, rng));
  }
}
BENCHMARK(BM_CvHeterodyneSample);

void BM_Bb84Session(benchmark::State& state) {
  Bb84Config config;
  config.n_sent = state.range(0);
  config.eta = 0.1;
  config.attack_fraction = 0.08;
  config.deletion_policy = DeletionPolicy::kDeleteBitOne;
  std::uint64_t trial = 0;
  for (auto _ : state) {
    RngStream rng(1, trial++, "bench.session");
    benchmark::DoNotOptimize(run_session(config, rng));
  }
  state.SetItemsProcessed(state.iterations() * config.n_sent);
}
BENCHMARK(BM_Bb84Session)->Arg(10000)->Arg(100000);

void BM_DecoyPulsePipeline(benchmark::State& state) {
  DecoyScheme scheme;
  scheme.levels = {{0.5, 0.5}, {0.1, 0.25}, {0.0, 0.25}};
  PnsAttackParams attack;
  attack.enabled = true;
  attack.block_single_prob = 0.3;
  std::uint64_t base = 0;
  const std::int64_t pulses = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_decoy_ensemble(scheme, 0.25, attack, pulses, 1, base));
    base += static_cast<std::uint64_t>(pulses);
  }
  state.SetItemsProcessed(state.iterations() * pulses);
}
BENCHMARK(BM_DecoyPulsePipeline);

void BM_DeletionOptimizerGrid(benchmark::State& state) {
  const auto ensemble = bb84_ensemble();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        optimal_deletion_advantage(ensemble, 0.5, state.range(0), 100));
}
BENCHMARK(BM_DeletionOptimizerGrid)->Arg(180)->Arg(720);

}  // namespace
}  // namespace qkdsim

BENCHMARK_MAIN();
