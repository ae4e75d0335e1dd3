// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "iddm/simplex.hpp"

namespace iddm {

/// Denoising predictor f(x_t, t): noisy sequence + time -> one simplex per
/// position. The neural denoiser, the perfect (data-conditioned) predictor
/// and test doubles all share this shape.
using Predictor = std::function<std::vector<Simplex>(std::span<const int>, double)>;

/// Oracle predictor returning the one-hot of the conditioning sequence at
/// every position, ignoring the input. Realizes the ELBO optimum.
inline Predictor make_perfect_predictor(std::vector<int> x, int k) {
  std::vector<Simplex> out;
  out.reserve(x.size());
  for (int c : x) out.push_back(Simplex::point_mass(k, c));
  return [out](std::span<const int> seq, double) {
    if (seq.size() != out.size()) throw ShapeError("perfect predictor: sequence length mismatch");
    return out;
  };
}

/// Predictor that always returns the uniform simplex (the zero-initialized
/// denoiser behaves identically).
inline Predictor make_uniform_predictor(int k) {
  return [k](std::span<const int> seq, double) {
    return std::vector<Simplex>(seq.size(), Simplex::uniform(k));
  };
}

}  // namespace iddm
