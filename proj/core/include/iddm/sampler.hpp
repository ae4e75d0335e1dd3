// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "iddm/predictor.hpp"
#include "iddm/schedule.hpp"
#include "iddm/simplex.hpp"

namespace iddm {

struct SamplerConfig {
  StepGrid grid;
  LambdaSchedule lambda = LambdaSchedule::constant(0.0);
  Simplex prior = Simplex::uniform(2);
  int length = 1;
  std::uint64_t seed = 0;
};

/// Optional per-chain record: state snapshots at every grid time (first entry
/// is the initial prior draw) and per-step transition counts summed over
/// positions.
struct TrajectoryStats {
  std::vector<std::vector<int>> states;
  std::vector<int> transitions_per_step;
  long long total_transitions = 0;
};

struct SampleResult {
  std::vector<int> sequence;
  std::optional<TrajectoryStats> stats;
};

/// One reverse chain: initializes from the prior, then for i = T..1 draws
/// every position from w_stay e_{x_t} + w_prior q1 + w_flip f(x_t, t).
/// Deterministic given (config.seed, chain_index).
SampleResult sample(const SamplerConfig& config, const Predictor& predictor, bool record,
                    std::uint64_t chain_index = 0);

/// n independent chains with per-chain rng substreams; results are ordered by
/// chain index regardless of thread count.
std::vector<SampleResult> sample_many(const SamplerConfig& config, const Predictor& predictor,
                                      int n, bool record, int threads = 1);

/// Recounts transitions from the recorded state snapshots (independent of the
/// running counters kept during generation).
long long count_transitions(const TrajectoryStats& stats);

/// Exact E[N_T] for a single position conditioned on data token x, using the
/// closed-form flip probabilities for the x_t = x and x_t != x branches with
/// the x_t != x case averaged under the marginal restricted to non-x states.
/// Linear in lambda.
double expected_transitions_exact(const StepGrid& grid, double lambda, const Simplex& prior,
                                  int x, const GammaSchedule& gamma_sched);

struct TransitionCurvePoint {
  double lambda = 0.0;
  double mean_transitions = 0.0;
};

/// Mean recorded transitions over n_chains chains for each lambda. Chain rng
/// substreams depend only on (seed, chain index), so the same noise drives
/// every lambda.
std::vector<TransitionCurvePoint> empirical_transition_curve(const SamplerConfig& base,
                                                             const Predictor& predictor,
                                                             std::span<const double> lambdas,
                                                             int n_chains, int threads = 1);

}  // namespace iddm
