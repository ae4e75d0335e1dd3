// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "iddm/denoiser.hpp"
#include "iddm/kernel.hpp"
#include "iddm/predictor.hpp"
#include "iddm/rng.hpp"
#include "iddm/schedule.hpp"

namespace iddm {

/// Discrete-time evidence lower bound, split into its three ingredients.
/// total = reconstruction - sum(diffusion_terms) - prior_kl, in nats.
struct ElboReport {
  double reconstruction = 0.0;
  std::vector<double> diffusion_terms;  // steps i = 2..T
  double prior_kl = 0.0;
  double total = 0.0;
};

/// KL(p || q) over categories. Terms with p(i) = 0 contribute zero; p(i) > 0
/// where q(i) = 0 is a support violation.
double kl_categorical(const Simplex& p, const Simplex& q);

/// Single-position KL between the true reverse transition and the model
/// transition with prediction x_theta.
double diffusion_loss_term(double gamma_s, double gamma_t, double lambda, int x_t, int x,
                           const Simplex& prior, const Simplex& x_theta);

/// One training tuple: noisy sequence, clean sequence, adjacent times.
struct TrainExample {
  std::vector<int> x_t;
  std::vector<int> x;
  double s = 0.0;
  double t = 0.0;
};

/// Mean over the batch of the per-sequence diffusion loss (positions summed).
double training_loss(std::span<const TrainExample> batch, double lambda, const Simplex& prior,
                     const Predictor& predictor);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grads;
};

/// Loss together with its exact gradient with respect to every denoiser
/// parameter. Batch elements reduce over fixed-size chunks in index order, so
/// the result is bit-identical for any thread count.
LossGrad training_loss_grad(std::span<const TrainExample> batch, double lambda,
                            const Simplex& prior, const DenoiserParams& params, int threads = 1);

/// Monte-Carlo ELBO of one data sequence: n_mc marginal draws per grid step.
ElboReport elbo(std::span<const int> x, const StepGrid& grid, double lambda, const Simplex& prior,
                const Predictor& predictor, SplitRng rng, int n_mc);

/// Mean of -elbo().total over the dataset divided by sequence length;
/// exp of the result is the perplexity.
double nll_metric(std::span<const std::vector<int>> dataset, const StepGrid& grid, double lambda,
                  const Simplex& prior, const Predictor& predictor, SplitRng rng, int n_mc);

}  // namespace iddm
