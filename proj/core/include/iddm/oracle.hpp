// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iddm/objective.hpp"
#include "iddm/predictor.hpp"
#include "iddm/schedule.hpp"
#include "iddm/simplex.hpp"

namespace iddm {

/// Hard bounds keeping brute-force enumeration tractable.
inline constexpr int kOracleMaxJointStates = 4096;
inline constexpr int kOracleMaxSteps = 64;

/// Exact joint distribution over all K^L states at every grid time, evolved
/// through the reverse chain. Joint states are mixed-radix integers with
/// position 0 as the most significant digit. table[i] corresponds to times[i];
/// table[T] is the initial prior product, table[0] the generated sample law.
struct ChainDistribution {
  int k = 0;
  int length = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> table;
};

/// Outcome of one verification suite entry. Deviations are elementwise
/// absolute errors; pass means max_deviation < threshold.
struct CheckReport {
  std::string name;
  long long trials = 0;
  double max_deviation = 0.0;
  double threshold = 1e-12;
  bool pass = false;
};

int joint_state_count(int k, int length);
std::vector<int> decode_joint_state(int index, int k, int length);

/// Evolves the exact reverse chain induced by parametrized_reverse with the
/// given predictor. Throws CapacityError beyond the enumeration bounds.
ChainDistribution enumerate_reverse(const StepGrid& grid, double lambda, const Simplex& prior,
                                    const Predictor& predictor, int k, int length);

/// Marginal consistency as an executable identity: sum_{x_t} p(x_s|x_t,x) p(x_t|x)
/// against p(x_s|x) over random (s, t, lambda, x, prior) tuples; lambda
/// endpoints 0 and 1 are always part of the rotation. A fixed prior may be
/// supplied, otherwise each trial draws a random full-support one.
/// weight_fault shifts mass from flip to stay after construction; nonzero
/// values are a fault-injection hook and must make the check fail.
CheckReport check_marginal_consistency(const GammaSchedule& gamma_sched,
                                       const std::optional<Simplex>& prior, int k,
                                       long long trials, std::uint64_t seed, int threads = 1,
                                       double weight_fault = 0.0);

/// Joint-factorization identity: posterior(i|j) m_t(j) == forward(j|i) m_s(i) for all
/// state pairs, over random tuples (full-support priors).
CheckReport check_bayes_forward(const GammaSchedule& gamma_sched,
                                const std::optional<Simplex>& prior, int k, long long trials,
                                std::uint64_t seed, int threads = 1);

/// Exact log p(x) under the model: forward-algorithm recursion over the
/// reverse chain followed by the reconstruction emission.
double exact_model_loglik(std::span<const int> x, const StepGrid& grid, double lambda,
                          const Simplex& prior, const Predictor& predictor);

/// Exact E[N_T] for a single position by evolving the chain with the perfect
/// predictor for x and accumulating per-step off-diagonal mass. Independent
/// route against sampler::expected_transitions_exact.
double expected_transitions_enumerated(const StepGrid& grid, double lambda, const Simplex& prior,
                                       int x);

/// Constraints (1) and (2) plus the weight-sum identity over random
/// (gamma_s, gamma_t, lambda) tuples.
CheckReport check_weight_constraints(long long trials, std::uint64_t seed, int threads = 1);

/// ELBO with every per-step expectation evaluated exactly by enumerating the
/// noisy joint states instead of Monte-Carlo draws. Same report layout as
/// objective::elbo.
ElboReport exact_elbo(std::span<const int> x, const StepGrid& grid, double lambda,
                      const Simplex& prior, const Predictor& predictor);

}  // namespace iddm
