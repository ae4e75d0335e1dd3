// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "iddm/kernel.hpp"
#include "iddm/rng.hpp"
#include "iddm/threading.hpp"

namespace iddm {

namespace {

constexpr double kLogFloor = 1e-300;

void check_capacity(int k, int length, int steps) {
  double states = 1.0;
  for (int l = 0; l < length; ++l) states *= k;
  if (states > kOracleMaxJointStates) {
    throw CapacityError("oracle: K^L exceeds the enumeration bound");
  }
  if (steps > kOracleMaxSteps) {
    throw CapacityError("oracle: step count exceeds the enumeration bound");
  }
}

// One reverse step applied to an exact joint distribution.
std::vector<double> apply_reverse_step(const std::vector<double>& dist, double t, double s,
                                       double lambda, const Simplex& prior,
                                       const Predictor& predictor, int k, int length) {
  const GammaSchedule gamma_sched;
  const double gamma_t = gamma_at(gamma_sched, t);
  const double gamma_s = gamma_at(gamma_sched, s);
  const PosteriorWeights w = posterior_weights(gamma_s, gamma_t, lambda);

  const std::size_t n = dist.size();
  std::vector<double> next(n, 0.0);
  std::vector<int> digits(static_cast<std::size_t>(length));
  for (std::size_t z = 0; z < n; ++z) {
    if (dist[z] == 0.0) continue;
    const std::vector<int> seq = decode_joint_state(static_cast<int>(z), k, length);
    const std::vector<Simplex> x_theta = predictor(seq, t);
    std::vector<Simplex> rows;
    rows.reserve(static_cast<std::size_t>(length));
    for (int l = 0; l < length; ++l) {
      rows.push_back(parametrized_reverse(w, seq[static_cast<std::size_t>(l)], prior,
                                          x_theta[static_cast<std::size_t>(l)]));
    }
    for (std::size_t d = 0; d < n; ++d) {
      int rest = static_cast<int>(d);
      double p = dist[z];
      for (int l = length - 1; l >= 0; --l) {
        digits[static_cast<std::size_t>(l)] = rest % k;
        rest /= k;
      }
      for (int l = 0; l < length; ++l) {
        p *= rows[static_cast<std::size_t>(l)][digits[static_cast<std::size_t>(l)]];
      }
      next[d] += p;
    }
  }
  return next;
}

std::vector<double> joint_prior(const Simplex& prior, int k, int length) {
  const int n = joint_state_count(k, length);
  std::vector<double> dist(static_cast<std::size_t>(n), 1.0);
  for (int z = 0; z < n; ++z) {
    const std::vector<int> seq = decode_joint_state(z, k, length);
    for (int c : seq) dist[static_cast<std::size_t>(z)] *= prior[c];
  }
  return dist;
}

struct Trial {
  double s;
  double t;
  double lambda;
  int x;
  Simplex prior;
};

Trial draw_trial(SplitRng rng, const std::optional<Simplex>& fixed_prior, int k,
                 long long index) {
  Trial trial{0.0, 0.0, 0.0, 0, Simplex::uniform(k)};
  trial.t = rng.next_double(1e-6, 1.0);
  trial.s = rng.next_double() * (1.0 - 1e-6) * trial.t;
  switch (index % 5) {
    case 0: trial.lambda = 0.0; break;
    case 1: trial.lambda = 1.0; break;
    default: trial.lambda = rng.next_double(); break;
  }
  trial.x = rng.next_below(k);
  if (fixed_prior) {
    trial.prior = *fixed_prior;
  } else {
    std::vector<double> p(static_cast<std::size_t>(k));
    double sum = 0.0;
    for (double& v : p) {
      v = 0.05 + rng.next_double();
      sum += v;
    }
    for (double& v : p) v /= sum;
    trial.prior = Simplex(std::move(p));
  }
  return trial;
}

// Max-reduction over parallel trial chunks; max is order-independent, so the
// report does not depend on the thread count.
double max_over_trials(long long trials, int threads,
                       const std::function<double(long long)>& deviation_of) {
  constexpr long long kChunk = 256;
  const std::size_t n_chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  std::vector<double> chunk_max(n_chunks, 0.0);
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    double worst = 0.0;
    const long long begin = static_cast<long long>(c) * kChunk;
    const long long end = std::min(trials, begin + kChunk);
    for (long long i = begin; i < end; ++i) {
      worst = std::max(worst, deviation_of(i));
    }
    chunk_max[c] = worst;
  });
  double worst = 0.0;
  for (double v : chunk_max) worst = std::max(worst, v);
  return worst;
}

}  // namespace

int joint_state_count(int k, int length) {
  long long n = 1;
  for (int l = 0; l < length; ++l) {
    n *= k;
    if (n > kOracleMaxJointStates) {
      throw CapacityError("oracle: K^L exceeds the enumeration bound");
    }
  }
  return static_cast<int>(n);
}

std::vector<int> decode_joint_state(int index, int k, int length) {
  std::vector<int> seq(static_cast<std::size_t>(length));
  for (int l = length - 1; l >= 0; --l) {
    seq[static_cast<std::size_t>(l)] = index % k;
    index /= k;
  }
  return seq;
}

ChainDistribution enumerate_reverse(const StepGrid& grid, double lambda, const Simplex& prior,
                                    const Predictor& predictor, int k, int length) {
  check_capacity(k, length, grid.steps);
  ChainDistribution chain;
  chain.k = k;
  chain.length = length;
  chain.times = grid.times;
  chain.table.assign(static_cast<std::size_t>(grid.steps) + 1, {});
  chain.table[static_cast<std::size_t>(grid.steps)] = joint_prior(prior, k, length);
  for (int i = grid.steps; i >= 1; --i) {
    chain.table[static_cast<std::size_t>(i - 1)] = apply_reverse_step(
        chain.table[static_cast<std::size_t>(i)], grid.times[static_cast<std::size_t>(i)],
        grid.times[static_cast<std::size_t>(i - 1)], lambda, prior, predictor, k, length);
  }
  return chain;
}

CheckReport check_marginal_consistency(const GammaSchedule& gamma_sched,
                                       const std::optional<Simplex>& prior, int k,
                                       long long trials, std::uint64_t seed, int threads,
                                       double weight_fault) {
  if (k < 2 || k > 8) throw CapacityError("check_marginal_consistency: requires 2 <= K <= 8");
  SplitRng root = SplitRng(seed).split(rng_stream::kOracle);

  const double worst = max_over_trials(trials, threads, [&](long long idx) {
    SplitRng rng = root.split(static_cast<std::uint64_t>(idx));
    const Trial trial = draw_trial(rng, prior, k, idx);
    const double gamma_t = gamma_at(gamma_sched, trial.t);
    const double gamma_s = gamma_at(gamma_sched, trial.s);
    PosteriorWeights w = posterior_weights(gamma_s, gamma_t, trial.lambda);
    w.stay += weight_fault;
    w.flip -= weight_fault;

    const Simplex m_t = marginal(gamma_t, trial.prior, trial.x);
    const Simplex m_s = marginal(gamma_s, trial.prior, trial.x);
    std::vector<double> mixed(static_cast<std::size_t>(k), 0.0);
    for (int x_t = 0; x_t < k; ++x_t) {
      const Simplex row = posterior(w, x_t, trial.prior, trial.x);
      for (int i = 0; i < k; ++i) mixed[static_cast<std::size_t>(i)] += row[i] * m_t[x_t];
    }
    double dev = 0.0;
    for (int i = 0; i < k; ++i) {
      dev = std::max(dev, std::abs(mixed[static_cast<std::size_t>(i)] - m_s[i]));
    }
    return dev;
  });

  CheckReport report;
  report.name = "marginal_consistency";
  report.trials = trials;
  report.max_deviation = worst;
  report.pass = worst < report.threshold;
  return report;
}

CheckReport check_bayes_forward(const GammaSchedule& gamma_sched,
                                const std::optional<Simplex>& prior, int k, long long trials,
                                std::uint64_t seed, int threads) {
  if (k < 2 || k > 8) throw CapacityError("check_bayes_forward: requires 2 <= K <= 8");
  SplitRng root = SplitRng(seed).split(rng_stream::kOracle).split(0xB);

  const double worst = max_over_trials(trials, threads, [&](long long idx) {
    SplitRng rng = root.split(static_cast<std::uint64_t>(idx));
    const Trial trial = draw_trial(rng, prior, k, idx);
    const double gamma_t = gamma_at(gamma_sched, trial.t);
    const double gamma_s = gamma_at(gamma_sched, trial.s);
    const PosteriorWeights w = posterior_weights(gamma_s, gamma_t, trial.lambda);
    const Simplex m_t = marginal(gamma_t, trial.prior, trial.x);
    const Simplex m_s = marginal(gamma_s, trial.prior, trial.x);
    const ForwardKernel fwd = forward_kernel(w, trial.prior, trial.x, m_t, m_s);

    double dev = 0.0;
    for (int i = 0; i < k; ++i) {
      const Simplex forward_row = fwd.row(i);
      for (int j = 0; j < k; ++j) {
        const Simplex reverse_row = posterior(w, j, trial.prior, trial.x);
        const double lhs = reverse_row[i] * m_t[j];
        const double rhs = forward_row[j] * m_s[i];
        dev = std::max(dev, std::abs(lhs - rhs));
      }
    }
    return dev;
  });

  CheckReport report;
  report.name = "bayes_forward";
  report.trials = trials;
  report.max_deviation = worst;
  report.pass = worst < report.threshold;
  return report;
}

double exact_model_loglik(std::span<const int> x, const StepGrid& grid, double lambda,
                          const Simplex& prior, const Predictor& predictor) {
  const int k = prior.size();
  const int length = static_cast<int>(x.size());
  check_capacity(k, length, grid.steps);
  for (int c : x) {
    if (c < 0 || c >= k) throw IndexError("exact_model_loglik: category out of range");
  }

  std::vector<double> alpha = joint_prior(prior, k, length);
  for (int i = grid.steps; i >= 2; --i) {
    alpha = apply_reverse_step(alpha, grid.times[static_cast<std::size_t>(i)],
                               grid.times[static_cast<std::size_t>(i - 1)], lambda, prior,
                               predictor, k, length);
  }

  const double t1 = grid.times[1];
  double prob = 0.0;
  for (std::size_t z = 0; z < alpha.size(); ++z) {
    if (alpha[z] == 0.0) continue;
    const std::vector<int> seq = decode_joint_state(static_cast<int>(z), k, length);
    const std::vector<Simplex> x_theta = predictor(seq, t1);
    double emission = 1.0;
    for (int l = 0; l < length; ++l) {
      emission *= x_theta[static_cast<std::size_t>(l)][x[static_cast<std::size_t>(l)]];
    }
    prob += alpha[z] * emission;
  }
  return std::log(prob < kLogFloor ? kLogFloor : prob);
}

double expected_transitions_enumerated(const StepGrid& grid, double lambda, const Simplex& prior,
                                       int x) {
  const GammaSchedule gamma_sched;
  const int k = prior.size();
  if (x < 0 || x >= k) throw IndexError("expected_transitions_enumerated: x out of range");
  check_capacity(k, 1, grid.steps);

  std::vector<double> dist(prior.probs());
  const Simplex x_theta = Simplex::point_mass(k, x);
  double total = 0.0;
  for (int i = grid.steps; i >= 1; --i) {
    const double t = grid.times[static_cast<std::size_t>(i)];
    const double s = grid.times[static_cast<std::size_t>(i - 1)];
    const PosteriorWeights w =
        posterior_weights(gamma_at(gamma_sched, s), gamma_at(gamma_sched, t), lambda);
    std::vector<double> next(static_cast<std::size_t>(k), 0.0);
    for (int state = 0; state < k; ++state) {
      if (dist[static_cast<std::size_t>(state)] == 0.0) continue;
      const Simplex row = parametrized_reverse(w, state, prior, x_theta);
      total += dist[static_cast<std::size_t>(state)] * (1.0 - row[state]);
      for (int dest = 0; dest < k; ++dest) {
        next[static_cast<std::size_t>(dest)] += dist[static_cast<std::size_t>(state)] * row[dest];
      }
    }
    dist = std::move(next);
  }
  return total;
}

CheckReport check_weight_constraints(long long trials, std::uint64_t seed, int threads) {
  SplitRng root = SplitRng(seed).split(rng_stream::kOracle).split(0xC);
  const double worst = max_over_trials(trials, threads, [&](long long idx) {
    SplitRng rng = root.split(static_cast<std::uint64_t>(idx));
    const double gamma_t = rng.next_double() * (1.0 - 1e-9);
    const double gamma_s = gamma_t + rng.next_double() * (1.0 - gamma_t);
    if (gamma_s <= gamma_t) return 0.0;
    double lambda = rng.next_double();
    if (idx % 5 == 0) lambda = 0.0;
    if (idx % 5 == 1) lambda = 1.0;
    const PosteriorWeights w = posterior_weights(gamma_s, gamma_t, lambda);
    const double c1 = std::abs(w.stay * (1.0 - gamma_t) + w.prior - (1.0 - gamma_s));
    const double c2 = std::abs(w.stay * gamma_t + w.flip - gamma_s);
    const double c3 = std::abs(w.stay + w.prior + w.flip - 1.0);
    return std::max({c1, c2, c3});
  });
  CheckReport report;
  report.name = "weight_constraints";
  report.trials = trials;
  report.max_deviation = worst;
  report.pass = worst < report.threshold;
  return report;
}

ElboReport exact_elbo(std::span<const int> x, const StepGrid& grid, double lambda,
                      const Simplex& prior, const Predictor& predictor) {
  const GammaSchedule gamma_sched;
  const int k = prior.size();
  const int length = static_cast<int>(x.size());
  check_capacity(k, length, grid.steps);

  ElboReport report;
  report.diffusion_terms.assign(
      grid.steps > 1 ? static_cast<std::size_t>(grid.steps - 1) : 0, 0.0);

  const int n = joint_state_count(k, length);
  for (int i = 1; i <= grid.steps; ++i) {
    const double t = grid.times[static_cast<std::size_t>(i)];
    const double s = grid.times[static_cast<std::size_t>(i - 1)];
    const double gamma_t = gamma_at(gamma_sched, t);
    const double gamma_s = gamma_at(gamma_sched, s);
    const PosteriorWeights w = posterior_weights(gamma_s, gamma_t, lambda);

    std::vector<Simplex> marginals;
    marginals.reserve(static_cast<std::size_t>(length));
    for (int l = 0; l < length; ++l) {
      marginals.push_back(marginal(gamma_t, prior, x[static_cast<std::size_t>(l)]));
    }

    double term = 0.0;
    for (int z = 0; z < n; ++z) {
      const std::vector<int> seq = decode_joint_state(z, k, length);
      double weight = 1.0;
      for (int l = 0; l < length; ++l) {
        weight *= marginals[static_cast<std::size_t>(l)][seq[static_cast<std::size_t>(l)]];
      }
      if (weight == 0.0) continue;
      const std::vector<Simplex> x_theta = predictor(seq, t);
      double inner = 0.0;
      for (int l = 0; l < length; ++l) {
        if (i == 1) {
          const Simplex q = parametrized_reverse(w, seq[static_cast<std::size_t>(l)], prior,
                                                 x_theta[static_cast<std::size_t>(l)]);
          const double p = q[x[static_cast<std::size_t>(l)]];
          inner += std::log(p < kLogFloor ? kLogFloor : p);
        } else {
          inner += diffusion_loss_term(gamma_s, gamma_t, lambda, seq[static_cast<std::size_t>(l)],
                                       x[static_cast<std::size_t>(l)], prior,
                                       x_theta[static_cast<std::size_t>(l)]);
        }
      }
      term += weight * inner;
    }
    if (i == 1) {
      report.reconstruction = term;
    } else {
      report.diffusion_terms[static_cast<std::size_t>(i - 2)] = term;
    }
  }

  const double gamma_final = gamma_at(gamma_sched, grid.times.back());
  for (int l = 0; l < length; ++l) {
    report.prior_kl += kl_categorical(
        marginal(gamma_final, prior, x[static_cast<std::size_t>(l)]), prior);
  }
  report.total = report.reconstruction - report.prior_kl;
  for (double term : report.diffusion_terms) report.total -= term;
  return report;
}

}  // namespace iddm
