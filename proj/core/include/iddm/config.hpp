// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iddm/data.hpp"

namespace iddm {

/// Every knob of a run. Defaults follow the reference conventions where they
/// transfer to desk scale: rho 4, lambda 0, ADAM(0.9, 0.999); the rest are
/// sized for the toy datasets.
struct RunConfig {
  // data.*
  std::string data_kind = "markov";  // pointmass | iid | markov | tinygraph
  int data_k = 4;
  int data_l = 3;
  int data_n = 4096;
  std::uint64_t data_seed = 7;
  double data_markov_stay = 0.7;
  std::vector<int> data_point;         // pointmass sequence; empty = zeros
  std::vector<double> data_iid_probs;  // iid token distribution; empty = uniform
  int data_nodes = 4;                  // tinygraph vertex count

  // prior.*
  std::string prior_kind = "marginal";  // uniform | marginal

  // schedule.* / sampler.*
  std::string gamma_kind = "linear";
  double lambda = 0.0;
  double rho = 4.0;
  int steps = 32;  // sampling grid T

  // train.*
  std::string optimizer = "adam";  // adam | sgd
  double lr = 2e-2;
  int batch = 1024;
  int train_steps = 2000;
  int dt_steps = 512;  // training-loop discretization: dt = 1/dt_steps
  int warmup = 100;
  double lr_decay = 0.1;  // multiplier reached at the final step
  std::uint64_t train_seed = 1;
  int log_every = 100;

  // denoiser.*
  int hidden = 64;
  int time_dim = 8;
};

/// Parses flat "dotted.key = value" text; '#' starts a comment, blank lines
/// are skipped, unknown keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Canonical serialization: fixed key order, round-trip-exact numbers. Equal
/// configs produce byte-identical text.
std::string serialize_config(const RunConfig& config);

/// Builds the dataset generator described by the data.* keys.
GeneratorSpec make_generator_spec(const RunConfig& config);

PriorSpec make_prior_spec(const RunConfig& config);

void validate_config(const RunConfig& config);

}  // namespace iddm
