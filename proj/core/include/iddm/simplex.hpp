// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "iddm/errors.hpp"
#include "iddm/rng.hpp"

namespace iddm {

/// Probability vector over K categories; the common currency for priors,
/// marginals, posterior rows and denoiser outputs.
///
/// Construction rejects negative entries, renormalizes when |sum - 1| <= 1e-9
/// and throws DomainError on larger drift so kernel bugs surface instead of
/// being hidden by silent normalization.
class Simplex {
 public:
  explicit Simplex(std::vector<double> probs);

  static Simplex uniform(int k);
  static Simplex point_mass(int k, int index);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& probs() const { return probs_; }

  bool operator==(const Simplex& other) const = default;

 private:
  std::vector<double> probs_;
};

/// Inverse-CDF draw over the stored category order: returns the first index i
/// with u < P[0] + ... + P[i]. Deterministic given the rng state.
int sample_categorical(const Simplex& dist, SplitRng& rng);

/// The inverse-CDF map itself, for a given uniform variate u in [0, 1).
int sample_categorical_given(const Simplex& dist, double u);

}  // namespace iddm
