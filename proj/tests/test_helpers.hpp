// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "iddm/kernel.hpp"
#include "iddm/predictor.hpp"
#include "iddm/rng.hpp"
#include "iddm/schedule.hpp"

namespace iddm::testing {

/// Random full-support simplex with every entry bounded away from zero.
inline Simplex random_simplex(SplitRng& rng, int k) {
  std::vector<double> p(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (double& v : p) {
    v = 0.05 + rng.next_double();
    sum += v;
  }
  for (double& v : p) v /= sum;
  return Simplex(std::move(p));
}

/// Single-token Bayes-optimal predictor for data distribution q0:
/// f(x_t, t)[x] proportional to q0(x) * m_t(x_t | x). This is the predictor
/// whose induced chain reproduces q0's single-step marginals exactly.
inline Predictor make_bayes_predictor(Simplex q0, Simplex prior) {
  return [q0 = std::move(q0), prior = std::move(prior)](std::span<const int> seq, double t) {
    const GammaSchedule gamma_sched;
    const double gamma_t = gamma_at(gamma_sched, t);
    const int k = q0.size();
    std::vector<Simplex> out;
    out.reserve(seq.size());
    for (int x_t : seq) {
      std::vector<double> post(static_cast<std::size_t>(k));
      double sum = 0.0;
      for (int x = 0; x < k; ++x) {
        post[static_cast<std::size_t>(x)] = q0[x] * marginal(gamma_t, prior, x)[x_t];
        sum += post[static_cast<std::size_t>(x)];
      }
      for (double& v : post) v /= sum;
      out.emplace_back(std::move(post));
    }
    return out;
  };
}

}  // namespace iddm::testing
