// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/kernel.hpp"

#include <cmath>

namespace iddm {

namespace {

constexpr double kConstraintTolerance = 1e-12;

void check_index(int i, int k, const char* what) {
  if (i < 0 || i >= k) throw IndexError(std::string(what) + ": category index out of range");
}

}  // namespace

Simplex marginal(double gamma_t, const Simplex& prior, int x) {
  if (!(gamma_t >= 0.0 && gamma_t <= 1.0)) {
    throw DomainError("marginal: gamma_t must lie in [0,1]");
  }
  check_index(x, prior.size(), "marginal");
  std::vector<double> out(prior.probs());
  for (double& p : out) p *= (1.0 - gamma_t);
  out[static_cast<std::size_t>(x)] += gamma_t;
  return Simplex(std::move(out));
}

PosteriorWeights posterior_weights(double gamma_s, double gamma_t, double lambda) {
  if (!(gamma_s >= 0.0 && gamma_s <= 1.0 && gamma_t >= 0.0 && gamma_t <= 1.0)) {
    throw DomainError("posterior_weights: gamma levels must lie in [0,1]");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("posterior_weights: lambda must lie in [0,1]");
  }
  if (gamma_t >= 1.0) {
    throw SingularityError("posterior_weights: gamma_t = 1 makes gamma_{s|t} undefined");
  }
  if (gamma_s <= gamma_t) {
    throw OrderingError("posterior_weights: requires gamma_s > gamma_t (s < t)");
  }

  const double gamma_cond = (1.0 - gamma_s) / (1.0 - gamma_t);
  PosteriorWeights w;
  w.stay = (1.0 - lambda) * gamma_cond;
  w.prior = lambda * (1.0 - gamma_s);
  w.flip = 1.0 - (w.stay + w.prior);

  // Algebraically equal closed form; divergence beyond rounding means a bug.
  const double flip_closed = (1.0 - lambda) * (1.0 - gamma_cond) + lambda * gamma_s;
  if (std::abs(flip_closed - w.flip) > kConstraintTolerance) {
    throw Error("posterior_weights: flip weight forms disagree");
  }
  if (w.flip < 0.0) w.flip = 0.0;

  const double c1 = w.stay * (1.0 - gamma_t) + w.prior - (1.0 - gamma_s);
  const double c2 = w.stay * gamma_t + w.flip - gamma_s;
  if (std::abs(c1) > kConstraintTolerance || std::abs(c2) > kConstraintTolerance) {
    throw Error("posterior_weights: marginal constraints violated");
  }
  return w;
}

Simplex posterior(const PosteriorWeights& weights, int x_t, const Simplex& prior, int x) {
  check_index(x_t, prior.size(), "posterior");
  check_index(x, prior.size(), "posterior");
  // Same accumulation order as parametrized_reverse, so plugging x_theta = e_x
  // there reproduces this result bit for bit.
  std::vector<double> out(prior.probs());
  for (double& p : out) p *= weights.prior;
  out[static_cast<std::size_t>(x)] += weights.flip;
  out[static_cast<std::size_t>(x_t)] += weights.stay;
  return Simplex(std::move(out));
}

Simplex parametrized_reverse(const PosteriorWeights& weights, int x_t, const Simplex& prior,
                             const Simplex& x_theta) {
  check_index(x_t, prior.size(), "parametrized_reverse");
  if (x_theta.size() != prior.size()) {
    throw ShapeError("parametrized_reverse: x_theta and prior sizes differ");
  }
  std::vector<double> out(static_cast<std::size_t>(prior.size()));
  for (int i = 0; i < prior.size(); ++i) {
    out[static_cast<std::size_t>(i)] = weights.prior * prior[i] + weights.flip * x_theta[i];
  }
  out[static_cast<std::size_t>(x_t)] += weights.stay;
  return Simplex(std::move(out));
}

Simplex ForwardKernel::row(int state) const {
  check_index(state, marginal_t.size(), "ForwardKernel::row");
  const double a = alpha[static_cast<std::size_t>(state)];
  std::vector<double> out(marginal_t.probs());
  for (double& p : out) p *= a;
  out[static_cast<std::size_t>(state)] += 1.0 - a;
  return Simplex(std::move(out));
}

ForwardKernel forward_kernel(const PosteriorWeights& weights, const Simplex& prior, int x,
                             const Simplex& marginal_t, const Simplex& marginal_s) {
  const int k = prior.size();
  check_index(x, k, "forward_kernel");
  if (marginal_t.size() != k || marginal_s.size() != k) {
    throw ShapeError("forward_kernel: marginal sizes differ from prior");
  }
  std::vector<double> alpha(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double d = weights.prior * prior[i] + (i == x ? weights.flip : 0.0);
    const double mass = marginal_s[i];
    if (mass <= 0.0) {
      throw SingularityError("forward_kernel: marginal_s has a zero entry");
    }
    double a = d / mass;
    if (a > 1.0) {
      if (a > 1.0 + 1e-9) {
        throw DomainError("forward_kernel: alpha exceeds 1; marginal_s is not the time-s marginal");
      }
      a = 1.0;
    }
    alpha[static_cast<std::size_t>(i)] = a;
  }
  return ForwardKernel{std::move(alpha), marginal_t};
}

}  // namespace iddm
