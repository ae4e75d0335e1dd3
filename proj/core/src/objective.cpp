// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/objective.hpp"

#include <cmath>

#include "iddm/threading.hpp"

namespace iddm {

namespace {

// Floor applied before logs that may see structural zeros (lambda = 0 paths).
constexpr double kLogFloor = 1e-300;

double safe_log(double x) { return std::log(x < kLogFloor ? kLogFloor : x); }

// Gradient of the summed per-position KL with respect to the output logits of
// one forward trace. Returns the per-sequence loss.
double sequence_loss_and_logit_grad(const TrainExample& ex, double lambda, const Simplex& prior,
                                    const GammaSchedule& gamma_sched, const ForwardTrace& trace,
                                    int k, std::vector<double>& grad_logits) {
  const double gamma_s = gamma_at(gamma_sched, ex.s);
  const double gamma_t = gamma_at(gamma_sched, ex.t);
  const PosteriorWeights w = posterior_weights(gamma_s, gamma_t, lambda);

  const int length = static_cast<int>(ex.x.size());
  double loss = 0.0;
  grad_logits.assign(static_cast<std::size_t>(length * k), 0.0);

  for (int l = 0; l < length; ++l) {
    const Simplex& x_theta = trace.probs[static_cast<std::size_t>(l)];
    const Simplex p = posterior(w, ex.x_t[static_cast<std::size_t>(l)], prior,
                                ex.x[static_cast<std::size_t>(l)]);
    const Simplex q = parametrized_reverse(w, ex.x_t[static_cast<std::size_t>(l)], prior, x_theta);
    loss += kl_categorical(p, q);

    // dKL/dx_theta[j] = -w_flip * p[j] / q[j]; chain through the softmax.
    double inner = 0.0;
    std::vector<double> gx(static_cast<std::size_t>(k), 0.0);
    for (int j = 0; j < k; ++j) {
      if (p[j] > 0.0) gx[static_cast<std::size_t>(j)] = -w.flip * p[j] / q[j];
      inner += gx[static_cast<std::size_t>(j)] * x_theta[j];
    }
    for (int j = 0; j < k; ++j) {
      grad_logits[static_cast<std::size_t>(l * k + j)] =
          x_theta[j] * (gx[static_cast<std::size_t>(j)] - inner);
    }
  }
  return loss;
}

}  // namespace

double kl_categorical(const Simplex& p, const Simplex& q) {
  if (p.size() != q.size()) throw ShapeError("kl_categorical: size mismatch");
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw SupportError("kl_categorical: p has mass where q is zero");
    }
    sum += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return sum < 0.0 ? 0.0 : sum;
}

double diffusion_loss_term(double gamma_s, double gamma_t, double lambda, int x_t, int x,
                           const Simplex& prior, const Simplex& x_theta) {
  const PosteriorWeights w = posterior_weights(gamma_s, gamma_t, lambda);
  const Simplex p = posterior(w, x_t, prior, x);
  const Simplex q = parametrized_reverse(w, x_t, prior, x_theta);
  return kl_categorical(p, q);
}

double training_loss(std::span<const TrainExample> batch, double lambda, const Simplex& prior,
                     const Predictor& predictor) {
  if (batch.empty()) throw DomainError("training_loss: batch must be nonempty");
  const GammaSchedule gamma_sched;
  double sum = 0.0;
  for (const TrainExample& ex : batch) {
    const double gamma_s = gamma_at(gamma_sched, ex.s);
    const double gamma_t = gamma_at(gamma_sched, ex.t);
    const std::vector<Simplex> x_theta = predictor(ex.x_t, ex.t);
    for (std::size_t l = 0; l < ex.x.size(); ++l) {
      sum += diffusion_loss_term(gamma_s, gamma_t, lambda, ex.x_t[l], ex.x[l], prior, x_theta[l]);
    }
  }
  return sum / static_cast<double>(batch.size());
}

LossGrad training_loss_grad(std::span<const TrainExample> batch, double lambda,
                            const Simplex& prior, const DenoiserParams& params, int threads) {
  if (batch.empty()) throw DomainError("training_loss_grad: batch must be nonempty");
  const GammaSchedule gamma_sched;
  const double scale = 1.0 / static_cast<double>(batch.size());

  // Fixed chunk size keeps the floating-point reduction order independent of
  // the thread count.
  constexpr std::size_t kChunk = 64;
  const std::size_t n_chunks = (batch.size() + kChunk - 1) / kChunk;
  std::vector<double> chunk_loss(n_chunks, 0.0);
  std::vector<std::vector<double>> chunk_grads(n_chunks);

  parallel_for(n_chunks, threads, [&](std::size_t c) {
    std::vector<double> acc(params.count(), 0.0);
    std::vector<double> grad_logits;
    double loss = 0.0;
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(batch.size(), begin + kChunk);
    for (std::size_t idx = begin; idx < end; ++idx) {
      const TrainExample& ex = batch[idx];
      const ForwardTrace trace = denoiser_forward_trace(params, ex.x_t, ex.t);
      loss += sequence_loss_and_logit_grad(ex, lambda, prior, gamma_sched, trace, params.k,
                                           grad_logits);
      const std::vector<double> g = denoiser_backward_from_trace(params, trace, grad_logits);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
    }
    chunk_loss[c] = loss;
    chunk_grads[c] = std::move(acc);
  });

  LossGrad out;
  out.grads.assign(params.count(), 0.0);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    out.loss += chunk_loss[c];
    for (std::size_t i = 0; i < out.grads.size(); ++i) out.grads[i] += chunk_grads[c][i];
  }
  out.loss *= scale;
  for (double& g : out.grads) g *= scale;
  return out;
}

ElboReport elbo(std::span<const int> x, const StepGrid& grid, double lambda, const Simplex& prior,
                const Predictor& predictor, SplitRng rng, int n_mc) {
  if (n_mc < 1) throw DomainError("elbo: n_mc must be >= 1");
  const GammaSchedule gamma_sched;
  const int steps = grid.steps;
  const int length = static_cast<int>(x.size());

  ElboReport report;
  report.diffusion_terms.assign(steps > 1 ? static_cast<std::size_t>(steps - 1) : 0, 0.0);

  std::vector<int> noisy(static_cast<std::size_t>(length), 0);
  for (int i = 1; i <= steps; ++i) {
    const double t = grid.times[static_cast<std::size_t>(i)];
    const double s = grid.times[static_cast<std::size_t>(i - 1)];
    const double gamma_t = gamma_at(gamma_sched, t);
    const double gamma_s = gamma_at(gamma_sched, s);
    const PosteriorWeights w = posterior_weights(gamma_s, gamma_t, lambda);

    SplitRng step_rng = rng.split(static_cast<std::uint64_t>(i));
    double term = 0.0;
    for (int m = 0; m < n_mc; ++m) {
      SplitRng draw_rng = step_rng.split(static_cast<std::uint64_t>(m));
      for (int l = 0; l < length; ++l) {
        const Simplex m_t = marginal(gamma_t, prior, x[static_cast<std::size_t>(l)]);
        noisy[static_cast<std::size_t>(l)] = sample_categorical(m_t, draw_rng);
      }
      const std::vector<Simplex> x_theta = predictor(noisy, t);
      for (int l = 0; l < length; ++l) {
        if (i == 1) {
          const Simplex q =
              parametrized_reverse(w, noisy[static_cast<std::size_t>(l)], prior,
                                   x_theta[static_cast<std::size_t>(l)]);
          term += safe_log(q[x[static_cast<std::size_t>(l)]]);
        } else {
          term += diffusion_loss_term(gamma_s, gamma_t, lambda, noisy[static_cast<std::size_t>(l)],
                                      x[static_cast<std::size_t>(l)], prior,
                                      x_theta[static_cast<std::size_t>(l)]);
        }
      }
    }
    term /= static_cast<double>(n_mc);
    if (i == 1) {
      report.reconstruction = term;
    } else {
      report.diffusion_terms[static_cast<std::size_t>(i - 2)] = term;
    }
  }

  const double gamma_final = gamma_at(gamma_sched, grid.times.back());
  for (int l = 0; l < length; ++l) {
    report.prior_kl += kl_categorical(marginal(gamma_final, prior, x[static_cast<std::size_t>(l)]),
                                      prior);
  }

  report.total = report.reconstruction - report.prior_kl;
  for (double term : report.diffusion_terms) report.total -= term;
  return report;
}

double nll_metric(std::span<const std::vector<int>> dataset, const StepGrid& grid, double lambda,
                  const Simplex& prior, const Predictor& predictor, SplitRng rng, int n_mc) {
  if (dataset.empty()) throw DomainError("nll_metric: dataset must be nonempty");
  double sum = 0.0;
  for (std::size_t idx = 0; idx < dataset.size(); ++idx) {
    const std::vector<int>& x = dataset[idx];
    const ElboReport report =
        elbo(x, grid, lambda, prior, predictor, rng.split(static_cast<std::uint64_t>(idx)), n_mc);
    sum += -report.total / static_cast<double>(x.size());
  }
  return sum / static_cast<double>(dataset.size());
}

}  // namespace iddm
