// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/simplex.hpp"

#include <cmath>
#include <utility>

namespace iddm {

namespace {
constexpr double kDriftTolerance = 1e-9;
}

Simplex::Simplex(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw DomainError("Simplex: empty probability vector");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (p < 0.0 || !std::isfinite(p)) {
      throw DomainError("Simplex: entries must be finite and nonnegative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDriftTolerance) {
    throw DomainError("Simplex: probabilities sum to " + std::to_string(sum) +
                      ", drift exceeds 1e-9");
  }
  if (sum != 1.0) {
    for (double& p : probs_) p /= sum;
  }
}

Simplex Simplex::uniform(int k) {
  if (k <= 0) throw DomainError("Simplex::uniform: k must be positive");
  return Simplex(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

Simplex Simplex::point_mass(int k, int index) {
  if (k <= 0) throw DomainError("Simplex::point_mass: k must be positive");
  if (index < 0 || index >= k) throw IndexError("Simplex::point_mass: index out of range");
  std::vector<double> p(static_cast<std::size_t>(k), 0.0);
  p[static_cast<std::size_t>(index)] = 1.0;
  return Simplex(std::move(p));
}

int sample_categorical(const Simplex& dist, SplitRng& rng) {
  return sample_categorical_given(dist, rng.next_double());
}

int sample_categorical_given(const Simplex& dist, double u) {
  double cum = 0.0;
  int last_positive = 0;
  for (int i = 0; i < dist.size(); ++i) {
    if (dist[i] > 0.0) last_positive = i;
    cum += dist[i];
    if (u < cum) return i;
  }
  // u landed past the accumulated sum (rounding); return the last live index.
  return last_positive;
}

}  // namespace iddm
