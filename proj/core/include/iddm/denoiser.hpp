// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "iddm/predictor.hpp"
#include "iddm/simplex.hpp"

namespace iddm {

/// Two-hidden-layer tanh MLP over [flattened one-hot sequence | sinusoidal
/// time embedding] with a per-position softmax head. Parameters live in one
/// flat 64-bit array (layout below) so checkpointing, optimizer steps and
/// finite-difference checks all walk the same buffer.
///
/// Layout, row-major: W1[hidden][in] b1[hidden] W2[hidden][hidden] b2[hidden]
/// W3[out][hidden] b3[out], with in = L*K + time_dim and out = L*K.
struct DenoiserParams {
  int k = 0;
  int length = 0;
  int hidden = 0;
  int time_dim = 0;
  std::vector<double> values;

  int input_dim() const { return length * k + time_dim; }
  int output_dim() const { return length * k; }
  std::size_t count() const {
    const auto h = static_cast<std::size_t>(hidden);
    const auto in = static_cast<std::size_t>(input_dim());
    const auto out = static_cast<std::size_t>(output_dim());
    return h * in + h + h * h + h + out * h + out;
  }
};

/// Sinusoidal features [sin(w_j t)..., cos(w_j t)...] with the w_j spaced
/// geometrically in [1, 100]; dim must be even and positive.
std::vector<double> time_embedding(int dim, double t);

/// Deterministic initialization: hidden weights uniform within 1/sqrt(fan_in),
/// biases and the whole output head zero, so the fresh model is exactly the
/// uniform predictor.
DenoiserParams denoiser_init(std::uint64_t seed, int k, int length, int hidden, int time_dim);

/// Activations cached by a forward pass; backward consumes it.
struct ForwardTrace {
  std::vector<double> input;
  std::vector<double> h1;
  std::vector<double> h2;
  std::vector<double> logits;
  std::vector<Simplex> probs;
};

ForwardTrace denoiser_forward_trace(const DenoiserParams& params, std::span<const int> x_t,
                                    double t);

/// Per-position output simplexes f_theta(x_t, t).
std::vector<Simplex> denoiser_forward(const DenoiserParams& params, std::span<const int> x_t,
                                      double t);

/// Exact reverse-mode gradient for a given trace and upstream logit gradient.
std::vector<double> denoiser_backward_from_trace(const DenoiserParams& params,
                                                 const ForwardTrace& trace,
                                                 std::span<const double> grad_logits);

/// Reverse-mode gradient of every parameter given the upstream gradient on
/// the output logits (recomputes the forward pass internally).
std::vector<double> denoiser_backward(const DenoiserParams& params, std::span<const int> x_t,
                                      double t, std::span<const double> grad_logits);

/// Plain gradient descent: params - lr * grads, as a new value.
DenoiserParams sgd_step(const DenoiserParams& params, std::span<const double> grads, double lr);

/// ADAM moment buffers; step counts from zero.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_params(const DenoiserParams& params);
};

/// ADAM update behind the same step interface as sgd_step.
DenoiserParams adam_step(const DenoiserParams& params, std::span<const double> grads, double lr,
                         AdamState& state);

/// Wraps the parameters as a Predictor (copies them into the closure).
Predictor make_denoiser_predictor(DenoiserParams params);

}  // namespace iddm
