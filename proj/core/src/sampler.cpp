// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/sampler.hpp"

#include "iddm/kernel.hpp"
#include "iddm/rng.hpp"
#include "iddm/threading.hpp"

namespace iddm {

SampleResult sample(const SamplerConfig& config, const Predictor& predictor, bool record,
                    std::uint64_t chain_index) {
  const GammaSchedule gamma_sched;
  const int steps = config.grid.steps;
  const int length = config.length;
  if (length < 1) throw DomainError("sample: sequence length must be >= 1");

  SplitRng rng = SplitRng(config.seed).split(rng_stream::kChains).split(chain_index);

  std::vector<int> state(static_cast<std::size_t>(length));
  for (int l = 0; l < length; ++l) state[static_cast<std::size_t>(l)] = sample_categorical(config.prior, rng);

  SampleResult result;
  if (record) {
    result.stats.emplace();
    result.stats->states.push_back(state);
    result.stats->transitions_per_step.reserve(static_cast<std::size_t>(steps));
  }

  for (int i = steps; i >= 1; --i) {
    const double t = config.grid.times[static_cast<std::size_t>(i)];
    const double s = config.grid.times[static_cast<std::size_t>(i - 1)];
    const double gamma_t = gamma_at(gamma_sched, t);
    const double gamma_s = gamma_at(gamma_sched, s);
    const double lambda_t = config.lambda.at(t);
    const PosteriorWeights w = posterior_weights(gamma_s, gamma_t, lambda_t);

    const std::vector<Simplex> x_theta = predictor(state, t);
    if (static_cast<int>(x_theta.size()) != length) {
      throw ShapeError("sample: predictor output length mismatch");
    }

    int changed = 0;
    for (int l = 0; l < length; ++l) {
      const Simplex dist =
          parametrized_reverse(w, state[static_cast<std::size_t>(l)], config.prior,
                               x_theta[static_cast<std::size_t>(l)]);
      const int next = sample_categorical(dist, rng);
      if (next != state[static_cast<std::size_t>(l)]) ++changed;
      state[static_cast<std::size_t>(l)] = next;
    }
    if (record) {
      result.stats->states.push_back(state);
      result.stats->transitions_per_step.push_back(changed);
      result.stats->total_transitions += changed;
    }
  }

  result.sequence = std::move(state);
  return result;
}

std::vector<SampleResult> sample_many(const SamplerConfig& config, const Predictor& predictor,
                                      int n, bool record, int threads) {
  if (n < 0) throw DomainError("sample_many: n must be nonnegative");
  std::vector<SampleResult> out(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t chain) {
    out[chain] = sample(config, predictor, record, static_cast<std::uint64_t>(chain));
  });
  return out;
}

long long count_transitions(const TrajectoryStats& stats) {
  long long total = 0;
  for (std::size_t k = 1; k < stats.states.size(); ++k) {
    const std::vector<int>& prev = stats.states[k - 1];
    const std::vector<int>& cur = stats.states[k];
    for (std::size_t l = 0; l < cur.size(); ++l) {
      if (prev[l] != cur[l]) ++total;
    }
  }
  return total;
}

double expected_transitions_exact(const StepGrid& grid, double lambda, const Simplex& prior,
                                  int x, const GammaSchedule& gamma_sched) {
  if (x < 0 || x >= prior.size()) throw IndexError("expected_transitions_exact: x out of range");
  double total = 0.0;
  for (int k = 1; k <= grid.steps; ++k) {
    const double t = grid.times[static_cast<std::size_t>(k)];
    const double s = grid.times[static_cast<std::size_t>(k - 1)];
    const double gamma_t = gamma_at(gamma_sched, t);
    const double gamma_s = gamma_at(gamma_sched, s);
    const double gamma_st = gamma_cond(gamma_sched, s, t);
    const Simplex m_t = marginal(gamma_t, prior, x);

    // x_t = x branch: flip probability lambda (1 - gamma_s) (1 - q1(x)).
    total += m_t[x] * lambda * (1.0 - gamma_s) * (1.0 - prior[x]);
    // x_t != x branch, averaged under the marginal restricted to non-x states.
    for (int i = 0; i < prior.size(); ++i) {
      if (i == x) continue;
      const double stay_prob = (1.0 - lambda) * gamma_st + lambda * (1.0 - gamma_s) * prior[i];
      total += m_t[i] * (1.0 - stay_prob);
    }
  }
  return total;
}

std::vector<TransitionCurvePoint> empirical_transition_curve(const SamplerConfig& base,
                                                             const Predictor& predictor,
                                                             std::span<const double> lambdas,
                                                             int n_chains, int threads) {
  if (n_chains < 1) throw DomainError("empirical_transition_curve: n_chains must be >= 1");
  std::vector<TransitionCurvePoint> curve;
  curve.reserve(lambdas.size());
  for (double lambda : lambdas) {
    SamplerConfig config = base;
    config.lambda = LambdaSchedule::constant(lambda);
    const std::vector<SampleResult> chains = sample_many(config, predictor, n_chains, true, threads);
    double sum = 0.0;
    for (const SampleResult& chain : chains) sum += static_cast<double>(chain.stats->total_transitions);
    curve.push_back({lambda, sum / static_cast<double>(n_chains)});
  }
  return curve;
}

}  // namespace iddm
