// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "iddm/denoiser.hpp"
#include "iddm/kernel.hpp"
#include "iddm/objective.hpp"
#include "iddm/oracle.hpp"
#include "iddm/sampler.hpp"

namespace {

using namespace iddm;

void BM_PosteriorWeights(benchmark::State& state) {
  double gamma_s = 0.75, gamma_t = 0.5, lambda = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(posterior_weights(gamma_s, gamma_t, lambda));
  }
}
BENCHMARK(BM_PosteriorWeights);

void BM_PosteriorRow(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Simplex prior = Simplex::uniform(k);
  const PosteriorWeights w = posterior_weights(0.75, 0.5, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(posterior(w, 1, prior, 0));
  }
}
BENCHMARK(BM_PosteriorRow)->Arg(4)->Arg(64)->Arg(1024);

void BM_DenoiserForward(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  const DenoiserParams params = denoiser_init(1, 4, 3, hidden, 8);
  const std::vector<int> seq{0, 2, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(denoiser_forward(params, seq, 0.4));
  }
}
BENCHMARK(BM_DenoiserForward)->Arg(32)->Arg(64)->Arg(128);

void BM_TrainingStep(benchmark::State& state) {
  const int batch_size = static_cast<int>(state.range(0));
  DenoiserParams params = denoiser_init(2, 4, 3, 64, 8);
  const Simplex prior = Simplex::uniform(4);
  SplitRng rng(3);
  std::vector<TrainExample> batch(static_cast<std::size_t>(batch_size));
  for (TrainExample& ex : batch) {
    ex.x = {rng.next_below(4), rng.next_below(4), rng.next_below(4)};
    ex.x_t = {rng.next_below(4), rng.next_below(4), rng.next_below(4)};
    ex.t = rng.next_double(0.01, 1.0);
    ex.s = ex.t - 0.005;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(training_loss_grad(batch, 0.0, prior, params, 1));
  }
  state.SetItemsProcessed(state.iterations() * batch_size);
}
BENCHMARK(BM_TrainingStep)->Arg(64)->Arg(256);

void BM_SampleChain(benchmark::State& state) {
  SamplerConfig config;
  config.grid = build_grid(static_cast<int>(state.range(0)), 4.0);
  config.prior = Simplex::uniform(4);
  config.length = 3;
  config.seed = 5;
  const DenoiserParams params = denoiser_init(4, 4, 3, 64, 8);
  const Predictor predictor = make_denoiser_predictor(params);
  std::uint64_t chain = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample(config, predictor, false, chain++));
  }
}
BENCHMARK(BM_SampleChain)->Arg(8)->Arg(32)->Arg(64);

void BM_EnumerateReverse(benchmark::State& state) {
  const int k = 4, length = 3;
  const StepGrid grid = build_grid(static_cast<int>(state.range(0)), 1.0);
  const Simplex prior = Simplex::uniform(k);
  const Predictor perfect = make_perfect_predictor({0, 1, 2}, k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_reverse(grid, 0.5, prior, perfect, k, length));
  }
}
BENCHMARK(BM_EnumerateReverse)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
