// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "iddm/errors.hpp"

namespace iddm {

/// Noise schedule gamma: [0,1] -> [0,1], monotone nonincreasing with
/// gamma(0) = 1 and gamma(1) = 0 exactly.
class GammaSchedule {
 public:
  enum class Kind { Linear };

  explicit GammaSchedule(Kind kind = Kind::Linear) : kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// gamma_t. Boundary values are exact: gamma(0) == 1.0, gamma(1) == 0.0.
double gamma_at(const GammaSchedule& sched, double t);

/// Conditional retention ratio gamma_{s|t} = (1 - gamma_s) / (1 - gamma_t).
/// Requires 0 <= s < t <= 1; t = 0 is a singularity.
double gamma_cond(const GammaSchedule& sched, double s, double t);

/// Resampling schedule lambda: time -> [0,1]. Only the constant kind is
/// exercised against reference values; the evaluation still takes t so a
/// time-varying kind can slot in later.
class LambdaSchedule {
 public:
  enum class Kind { Constant };

  static LambdaSchedule constant(double value);

  double at(double t) const;
  Kind kind() const { return kind_; }

 private:
  LambdaSchedule(Kind kind, double value) : kind_(kind), value_(value) {}

  Kind kind_;
  double value_;
};

/// Discrete time grid t(0) = 0 < t(1) < ... < t(T) = 1, optionally distorted
/// by t(i) = (i/T)^rho. The grid is stored ascending; the sampler walks it
/// descending, so rho > 1 concentrates reverse steps near t = 0, the end of
/// generation.
struct StepGrid {
  int steps;
  double rho;
  std::vector<double> times;
};

/// Builds the distorted grid with times[i] = (i/T)^rho. Requires T >= 1 and
/// rho >= 1.
StepGrid build_grid(int steps, double rho);

}  // namespace iddm
