// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "iddm/simplex.hpp"

namespace iddm {

/// Stay/prior/flip mixture weights of the reverse transition between a fixed
/// pair of noise levels. Constructible only through posterior_weights(), which
/// enforces both marginal constraints:
///   (1) w_stay * (1 - gamma_t) + w_prior = 1 - gamma_s
///   (2) w_stay * gamma_t       + w_flip  = gamma_s
struct PosteriorWeights {
  double stay;
  double prior;
  double flip;
};

/// Non-Markovian forward kernel p(x_t | x_s, x) in mixture form: row i is
/// alpha[i] * marginal_t + (1 - alpha[i]) * e_i. Exposed for verification
/// only; generation never consults it.
struct ForwardKernel {
  std::vector<double> alpha;
  Simplex marginal_t;

  /// Materializes row `state` of the kernel as a distribution over x_t.
  Simplex row(int state) const;
};

/// Interpolating marginal (1 - gamma_t) * prior + gamma_t * e_x.
Simplex marginal(double gamma_t, const Simplex& prior, int x);

/// Marginal-consistent weights for levels gamma_s > gamma_t and resampling strength
/// lambda. Throws SingularityError when gamma_t = 1 and OrderingError when
/// gamma_s <= gamma_t. The closed-form flip weight
/// (1-lambda)(1-gamma_{s|t}) + lambda*gamma_s is asserted against the
/// complement form 1 - (w_stay + w_prior) at construction.
PosteriorWeights posterior_weights(double gamma_s, double gamma_t, double lambda);

/// Reverse transition p(x_s | x_t, x) = w_stay e_{x_t} + w_prior prior + w_flip e_x.
Simplex posterior(const PosteriorWeights& weights, int x_t, const Simplex& prior, int x);

/// Model transition with the prediction x_theta in place of e_x. Equals
/// posterior() when x_theta is the one-hot of x, and is affine in x_theta.
Simplex parametrized_reverse(const PosteriorWeights& weights, int x_t, const Simplex& prior,
                             const Simplex& x_theta);

/// Bayes-derived forward kernel. alpha[i] = D_i / marginal_s(i) with
/// D_i = w_prior * prior(i) + w_flip * 1[i = x]; requires every marginal_s
/// entry positive (full-support prior, s < 1).
ForwardKernel forward_kernel(const PosteriorWeights& weights, const Simplex& prior, int x,
                             const Simplex& marginal_t, const Simplex& marginal_s);

}  // namespace iddm
