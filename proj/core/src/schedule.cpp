// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/schedule.hpp"

#include <cmath>

namespace iddm {

double gamma_at(const GammaSchedule& sched, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("gamma_at: t must lie in [0,1]");
  }
  switch (sched.kind()) {
    case GammaSchedule::Kind::Linear:
      return 1.0 - t;
  }
  throw DomainError("gamma_at: unknown schedule kind");
}

double gamma_cond(const GammaSchedule& sched, double s, double t) {
  if (!(s >= 0.0 && t <= 1.0)) {
    throw DomainError("gamma_cond: times must lie in [0,1]");
  }
  if (t == 0.0) {
    throw SingularityError("gamma_cond: t = 0 makes the ratio undefined");
  }
  if (s >= t) {
    throw OrderingError("gamma_cond: requires s < t");
  }
  const double gamma_t = gamma_at(sched, t);
  const double denom = 1.0 - gamma_t;
  if (denom <= 0.0) {
    throw SingularityError("gamma_cond: gamma_t = 1, ratio undefined");
  }
  const double ratio = (1.0 - gamma_at(sched, s)) / denom;
  // Monotone schedules guarantee the ratio lies in [0,1]; clamp the last ulp.
  return ratio < 0.0 ? 0.0 : (ratio > 1.0 ? 1.0 : ratio);
}

LambdaSchedule LambdaSchedule::constant(double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("LambdaSchedule: constant value must lie in [0,1]");
  }
  return LambdaSchedule(Kind::Constant, value);
}

double LambdaSchedule::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("LambdaSchedule::at: t must lie in [0,1]");
  }
  switch (kind_) {
    case Kind::Constant:
      return value_;
  }
  throw DomainError("LambdaSchedule::at: unknown kind");
}

StepGrid build_grid(int steps, double rho) {
  if (steps < 1) throw DomainError("build_grid: step count must be >= 1");
  if (!(rho >= 1.0)) throw DomainError("build_grid: rho must be >= 1");

  StepGrid grid;
  grid.steps = steps;
  grid.rho = rho;
  grid.times.resize(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const double u = static_cast<double>(i) / steps;
    grid.times[static_cast<std::size_t>(i)] = (rho == 1.0) ? u : std::pow(u, rho);
  }
  grid.times.front() = 0.0;
  grid.times.back() = 1.0;
  for (std::size_t i = 1; i < grid.times.size(); ++i) {
    if (!(grid.times[i] > grid.times[i - 1])) {
      throw DomainError("build_grid: grid not strictly increasing");
    }
  }
  return grid;
}

}  // namespace iddm
