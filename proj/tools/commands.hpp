// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "iddm/checkpoint.hpp"
#include "iddm/config.hpp"
#include "iddm/oracle.hpp"

namespace iddm::cli {

struct VerifyOptions {
  long long trials = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  // Test hook: perturbs posterior weights inside the marginal-consistency
  // check; any nonzero value must turn the run red.
  double inject_fault = 0.0;
};

struct VerifyResult {
  std::vector<CheckReport> reports;
  bool pass = false;
};

/// Runs the full distributional-identity suite (no checkpoint, no dataset)
/// and prints one line per check. Exit-style result: pass iff every check
/// stayed under its 1e-12 threshold.
VerifyResult cmd_verify(const VerifyOptions& options, std::ostream& out);

struct TrainResult {
  Checkpoint checkpoint;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> losses;
};

/// Algorithm-1 loop: per step draws a batch (x, t ~ U(dt,1), s = t - dt,
/// x_t ~ marginal), takes one optimizer step on the lambda = 0 diffusion
/// loss, then writes the checkpoint (with the canonical config echo) to
/// out_path. Empty out_path skips the write.
TrainResult cmd_train(const RunConfig& config, const std::string& out_path, std::ostream& log,
                      int threads = 1);

struct SampleOptions {
  std::string checkpoint_path;
  std::string out_path;
  int n = 0;
  std::optional<double> lambda;
  std::optional<double> rho;
  std::optional<int> steps;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SampleSummary {
  double mean_transitions = 0.0;
  int n = 0;
};

/// Generates n chains from a checkpoint and writes them in the dataset
/// fixture format; prints the mean per-chain transition count.
SampleSummary cmd_sample(const SampleOptions& options, std::ostream& log);

struct ElboOptions {
  std::string checkpoint_path;
  std::string data_path;
  std::optional<double> lambda;
  int steps = 32;
  int n_mc = 8;
  std::uint64_t seed = 0;
  // Test hook: score each sequence with its own perfect predictor instead of
  // the checkpointed model.
  bool perfect_predictor = false;
};

struct ElboSummary {
  double nats_per_token = 0.0;
  double perplexity = 1.0;
};

ElboSummary cmd_elbo(const ElboOptions& options, std::ostream& log);

struct SweepOptions {
  std::string checkpoint_path;
  std::vector<double> lambdas;
  std::vector<double> rhos;
  std::vector<int> steps;
  int n = 256;
  std::uint64_t seed = 0;
  int threads = 1;
  int elbo_subset = 128;  // dataset rows used for the nats column
  int elbo_mc = 4;
};

/// Deterministic (lambda, rho, T) grid evaluation. Returns the tab-separated
/// table ('#'-prefixed header; one row per cell) that the CLI prints.
std::string cmd_sweep(const SweepOptions& options);

}  // namespace iddm::cli
