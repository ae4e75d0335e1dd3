// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "iddm/simplex.hpp"

namespace iddm {

/// Every sample equals the given sequence.
struct PointMassSpec {
  int k = 2;
  std::vector<int> sequence;
};

/// Positions drawn independently from one categorical.
struct IidSpec {
  int length = 1;
  Simplex probs = Simplex::uniform(2);
};

/// First-order chain over positions; transition is k x k row-major.
struct MarkovSpec {
  int length = 2;
  Simplex initial = Simplex::uniform(2);
  std::vector<double> transition;
};

/// Planted two-community graph on `nodes` vertices. Each sample draws one
/// fair community bit per node; an edge slot between same-community nodes
/// takes type min(1, K-1) with probability 0.8, otherwise type 0 with
/// probability 0.8 (remaining mass uniform over the other types). The upper
/// triangle flattens row-major to a sequence of length N(N-1)/2 with K equal
/// to the edge-type count.
struct TinyGraphSpec {
  int nodes = 3;
  int edge_types = 2;
};

using GeneratorSpec = std::variant<PointMassSpec, IidSpec, MarkovSpec, TinyGraphSpec>;

int spec_alphabet_size(const GeneratorSpec& spec);
int spec_sequence_length(const GeneratorSpec& spec);

struct ToyDataset {
  int k = 0;
  int length = 0;
  std::vector<std::vector<int>> samples;
  std::optional<GeneratorSpec> spec;
};

/// Prior over tokens: uniform, or the smoothed empirical marginal.
struct PriorSpec {
  enum class Kind { Uniform, Marginal };
  Kind kind = Kind::Marginal;
};

/// Draws n samples from the generator; deterministic per seed.
ToyDataset generate(const GeneratorSpec& spec, int n, std::uint64_t seed);

/// Global token-frequency simplex with add-one smoothing (count + 1)/(n + K),
/// so every category keeps positive mass.
Simplex estimate_prior(const ToyDataset& dataset);

Simplex resolve_prior(const PriorSpec& spec, const ToyDataset& dataset);

/// Total variation 0.5 * sum |p - q| between same-sized dense tables.
double tv_distance(std::span<const double> p, std::span<const double> q);

/// Mixed-radix joint index of a sequence (position 0 most significant).
int joint_index(std::span<const int> seq, int k);

/// Normalized histogram over all K^L joint states; bounded by K^L <= 4096.
std::vector<double> empirical_joint(std::span<const std::vector<int>> samples, int k, int length);

/// Exact joint distribution of a generator spec over all K^L states.
/// TinyGraph enumerates the 2^N community patterns (N <= 12).
std::vector<double> exact_joint(const GeneratorSpec& spec);

/// Fixture format: one "K L" header line, then one sample per line as
/// space-separated token indices.
void write_dataset(const std::string& path, const ToyDataset& dataset);
ToyDataset read_dataset(const std::string& path);

}  // namespace iddm
