// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/denoiser.hpp"

#include <cmath>

#include "iddm/errors.hpp"
#include "iddm/rng.hpp"

namespace iddm {

namespace {

struct Layout {
  std::size_t w1, b1, w2, b2, w3, b3;
  std::size_t in, hid, out;

  explicit Layout(const DenoiserParams& p)
      : in(static_cast<std::size_t>(p.input_dim())),
        hid(static_cast<std::size_t>(p.hidden)),
        out(static_cast<std::size_t>(p.output_dim())) {
    w1 = 0;
    b1 = w1 + hid * in;
    w2 = b1 + hid;
    b2 = w2 + hid * hid;
    w3 = b2 + hid;
    b3 = w3 + out * hid;
  }
};

void check_shapes(const DenoiserParams& params, std::span<const int> x_t) {
  if (params.values.size() != params.count()) {
    throw ShapeError("denoiser: parameter buffer size does not match layout");
  }
  if (static_cast<int>(x_t.size()) != params.length) {
    throw ShapeError("denoiser: sequence length does not match parameter layout");
  }
  for (int c : x_t) {
    if (c < 0 || c >= params.k) throw IndexError("denoiser: category index out of range");
  }
}

}  // namespace

std::vector<double> time_embedding(int dim, double t) {
  if (dim <= 0 || dim % 2 != 0) {
    throw DomainError("time_embedding: dim must be a positive even number");
  }
  const int m = dim / 2;
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int j = 0; j < m; ++j) {
    const double omega =
        (m == 1) ? 1.0 : std::pow(100.0, static_cast<double>(j) / (m - 1));
    out[static_cast<std::size_t>(j)] = std::sin(omega * t);
    out[static_cast<std::size_t>(m + j)] = std::cos(omega * t);
  }
  return out;
}

DenoiserParams denoiser_init(std::uint64_t seed, int k, int length, int hidden, int time_dim) {
  if (k <= 0 || length <= 0 || hidden <= 0) {
    throw DomainError("denoiser_init: dimensions must be positive");
  }
  if (time_dim <= 0 || time_dim % 2 != 0) {
    throw DomainError("denoiser_init: time_dim must be a positive even number");
  }
  DenoiserParams p;
  p.k = k;
  p.length = length;
  p.hidden = hidden;
  p.time_dim = time_dim;
  p.values.assign(p.count(), 0.0);

  const Layout lay(p);
  SplitRng rng = SplitRng(seed).split(rng_stream::kDenoiserInit);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(lay.in));
  for (std::size_t i = 0; i < lay.hid * lay.in; ++i) {
    p.values[lay.w1 + i] = rng.next_double(-bound1, bound1);
  }
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(lay.hid));
  for (std::size_t i = 0; i < lay.hid * lay.hid; ++i) {
    p.values[lay.w2 + i] = rng.next_double(-bound2, bound2);
  }
  // b1, b2, W3, b3 stay zero: the fresh head emits uniform simplexes.
  return p;
}

ForwardTrace denoiser_forward_trace(const DenoiserParams& params, std::span<const int> x_t,
                                    double t) {
  check_shapes(params, x_t);
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("denoiser_forward: t must lie in [0,1]");

  const Layout lay(params);
  const double* v = params.values.data();

  ForwardTrace tr;
  tr.input.assign(lay.in, 0.0);
  for (int l = 0; l < params.length; ++l) {
    tr.input[static_cast<std::size_t>(l * params.k + x_t[static_cast<std::size_t>(l)])] = 1.0;
  }
  const std::vector<double> emb = time_embedding(params.time_dim, t);
  for (int j = 0; j < params.time_dim; ++j) {
    tr.input[static_cast<std::size_t>(params.length * params.k + j)] =
        emb[static_cast<std::size_t>(j)];
  }

  tr.h1.assign(lay.hid, 0.0);
  for (std::size_t h = 0; h < lay.hid; ++h) {
    double acc = v[lay.b1 + h];
    const double* row = v + lay.w1 + h * lay.in;
    for (std::size_t i = 0; i < lay.in; ++i) acc += row[i] * tr.input[i];
    tr.h1[h] = std::tanh(acc);
  }
  tr.h2.assign(lay.hid, 0.0);
  for (std::size_t h = 0; h < lay.hid; ++h) {
    double acc = v[lay.b2 + h];
    const double* row = v + lay.w2 + h * lay.hid;
    for (std::size_t i = 0; i < lay.hid; ++i) acc += row[i] * tr.h1[i];
    tr.h2[h] = std::tanh(acc);
  }
  tr.logits.assign(lay.out, 0.0);
  for (std::size_t o = 0; o < lay.out; ++o) {
    double acc = v[lay.b3 + o];
    const double* row = v + lay.w3 + o * lay.hid;
    for (std::size_t i = 0; i < lay.hid; ++i) acc += row[i] * tr.h2[i];
    tr.logits[o] = acc;
  }

  tr.probs.reserve(static_cast<std::size_t>(params.length));
  for (int l = 0; l < params.length; ++l) {
    const double* z = tr.logits.data() + static_cast<std::size_t>(l * params.k);
    double zmax = z[0];
    for (int c = 1; c < params.k; ++c) zmax = std::max(zmax, z[c]);
    std::vector<double> probs(static_cast<std::size_t>(params.k));
    double sum = 0.0;
    for (int c = 0; c < params.k; ++c) {
      probs[static_cast<std::size_t>(c)] = std::exp(z[c] - zmax);
      sum += probs[static_cast<std::size_t>(c)];
    }
    for (double& pr : probs) pr /= sum;
    tr.probs.emplace_back(std::move(probs));
  }
  return tr;
}

std::vector<Simplex> denoiser_forward(const DenoiserParams& params, std::span<const int> x_t,
                                      double t) {
  return denoiser_forward_trace(params, x_t, t).probs;
}

std::vector<double> denoiser_backward_from_trace(const DenoiserParams& params,
                                                 const ForwardTrace& trace,
                                                 std::span<const double> grad_logits) {
  const Layout lay(params);
  if (grad_logits.size() != lay.out) {
    throw ShapeError("denoiser_backward: upstream gradient size mismatch");
  }
  const double* v = params.values.data();
  std::vector<double> grads(params.count(), 0.0);
  double* g = grads.data();

  // Head.
  for (std::size_t o = 0; o < lay.out; ++o) {
    const double go = grad_logits[o];
    g[lay.b3 + o] = go;
    double* row = g + lay.w3 + o * lay.hid;
    for (std::size_t i = 0; i < lay.hid; ++i) row[i] = go * trace.h2[i];
  }
  // Into h2, through tanh.
  std::vector<double> gh2(lay.hid, 0.0);
  for (std::size_t o = 0; o < lay.out; ++o) {
    const double go = grad_logits[o];
    const double* row = v + lay.w3 + o * lay.hid;
    for (std::size_t i = 0; i < lay.hid; ++i) gh2[i] += go * row[i];
  }
  for (std::size_t i = 0; i < lay.hid; ++i) gh2[i] *= 1.0 - trace.h2[i] * trace.h2[i];

  for (std::size_t h = 0; h < lay.hid; ++h) {
    g[lay.b2 + h] = gh2[h];
    double* row = g + lay.w2 + h * lay.hid;
    for (std::size_t i = 0; i < lay.hid; ++i) row[i] = gh2[h] * trace.h1[i];
  }
  // Into h1.
  std::vector<double> gh1(lay.hid, 0.0);
  for (std::size_t h = 0; h < lay.hid; ++h) {
    const double* row = v + lay.w2 + h * lay.hid;
    for (std::size_t i = 0; i < lay.hid; ++i) gh1[i] += gh2[h] * row[i];
  }
  for (std::size_t i = 0; i < lay.hid; ++i) gh1[i] *= 1.0 - trace.h1[i] * trace.h1[i];

  for (std::size_t h = 0; h < lay.hid; ++h) {
    g[lay.b1 + h] = gh1[h];
    double* row = g + lay.w1 + h * lay.in;
    for (std::size_t i = 0; i < lay.in; ++i) row[i] = gh1[h] * trace.input[i];
  }
  return grads;
}

std::vector<double> denoiser_backward(const DenoiserParams& params, std::span<const int> x_t,
                                      double t, std::span<const double> grad_logits) {
  const ForwardTrace trace = denoiser_forward_trace(params, x_t, t);
  return denoiser_backward_from_trace(params, trace, grad_logits);
}

DenoiserParams sgd_step(const DenoiserParams& params, std::span<const double> grads, double lr) {
  if (grads.size() != params.values.size()) {
    throw ShapeError("sgd_step: gradient size mismatch");
  }
  if (!(lr >= 0.0)) throw DomainError("sgd_step: learning rate must be nonnegative");
  DenoiserParams out = params;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] -= lr * grads[i];
  }
  return out;
}

AdamState AdamState::for_params(const DenoiserParams& params) {
  AdamState s;
  s.m.assign(params.values.size(), 0.0);
  s.v.assign(params.values.size(), 0.0);
  return s;
}

DenoiserParams adam_step(const DenoiserParams& params, std::span<const double> grads, double lr,
                         AdamState& state) {
  if (grads.size() != params.values.size() || state.m.size() != params.values.size()) {
    throw ShapeError("adam_step: buffer size mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  DenoiserParams out = params;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    out.values[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
  }
  return out;
}

Predictor make_denoiser_predictor(DenoiserParams params) {
  return [params = std::move(params)](std::span<const int> seq, double t) {
    return denoiser_forward(params, seq, t);
  };
}

}  // namespace iddm
