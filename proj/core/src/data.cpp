// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "iddm/errors.hpp"

namespace iddm {

namespace {

constexpr int kMaxJointStates = 4096;

void validate_spec(const GeneratorSpec& spec) {
  if (const auto* pm = std::get_if<PointMassSpec>(&spec)) {
    if (pm->k < 2) throw DomainError("PointMassSpec: k must be >= 2");
    if (pm->sequence.empty()) throw DomainError("PointMassSpec: empty sequence");
    for (int c : pm->sequence) {
      if (c < 0 || c >= pm->k) throw IndexError("PointMassSpec: token out of range");
    }
  } else if (const auto* iid = std::get_if<IidSpec>(&spec)) {
    if (iid->length < 1) throw DomainError("IidSpec: length must be >= 1");
  } else if (const auto* mk = std::get_if<MarkovSpec>(&spec)) {
    const int k = mk->initial.size();
    if (mk->length < 1) throw DomainError("MarkovSpec: length must be >= 1");
    if (static_cast<int>(mk->transition.size()) != k * k) {
      throw ShapeError("MarkovSpec: transition must be k x k");
    }
    for (int row = 0; row < k; ++row) {
      double sum = 0.0;
      for (int col = 0; col < k; ++col) {
        const double p = mk->transition[static_cast<std::size_t>(row * k + col)];
        if (p < 0.0) throw DomainError("MarkovSpec: negative transition entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw DomainError("MarkovSpec: transition row not normalized");
    }
  } else if (const auto* tg = std::get_if<TinyGraphSpec>(&spec)) {
    if (tg->nodes < 2 || tg->nodes > 12) throw DomainError("TinyGraphSpec: nodes must be in [2,12]");
    if (tg->edge_types < 2) throw DomainError("TinyGraphSpec: need at least 2 edge types");
  }
}

// Edge-type distribution of the planted-partition graph for one slot.
std::vector<double> tiny_graph_edge_dist(bool same_community, int edge_types) {
  const int favored = same_community ? std::min(1, edge_types - 1) : 0;
  std::vector<double> dist(static_cast<std::size_t>(edge_types),
                           0.2 / (edge_types - 1));
  dist[static_cast<std::size_t>(favored)] = 0.8;
  return dist;
}

}  // namespace

int spec_alphabet_size(const GeneratorSpec& spec) {
  if (const auto* pm = std::get_if<PointMassSpec>(&spec)) return pm->k;
  if (const auto* iid = std::get_if<IidSpec>(&spec)) return iid->probs.size();
  if (const auto* mk = std::get_if<MarkovSpec>(&spec)) return mk->initial.size();
  return std::get<TinyGraphSpec>(spec).edge_types;
}

int spec_sequence_length(const GeneratorSpec& spec) {
  if (const auto* pm = std::get_if<PointMassSpec>(&spec)) {
    return static_cast<int>(pm->sequence.size());
  }
  if (const auto* iid = std::get_if<IidSpec>(&spec)) return iid->length;
  if (const auto* mk = std::get_if<MarkovSpec>(&spec)) return mk->length;
  const auto& tg = std::get<TinyGraphSpec>(spec);
  return tg.nodes * (tg.nodes - 1) / 2;
}

ToyDataset generate(const GeneratorSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("generate: n must be >= 1");
  validate_spec(spec);

  ToyDataset out;
  out.k = spec_alphabet_size(spec);
  out.length = spec_sequence_length(spec);
  out.spec = spec;
  out.samples.reserve(static_cast<std::size_t>(n));

  SplitRng root = SplitRng(seed).split(rng_stream::kDataset);
  for (int i = 0; i < n; ++i) {
    SplitRng rng = root.split(static_cast<std::uint64_t>(i));
    std::vector<int> sample(static_cast<std::size_t>(out.length));
    if (const auto* pm = std::get_if<PointMassSpec>(&spec)) {
      sample = pm->sequence;
    } else if (const auto* iid = std::get_if<IidSpec>(&spec)) {
      for (int l = 0; l < out.length; ++l) {
        sample[static_cast<std::size_t>(l)] = sample_categorical(iid->probs, rng);
      }
    } else if (const auto* mk = std::get_if<MarkovSpec>(&spec)) {
      int state = sample_categorical(mk->initial, rng);
      sample[0] = state;
      for (int l = 1; l < out.length; ++l) {
        std::vector<double> row(mk->transition.begin() + state * out.k,
                                mk->transition.begin() + (state + 1) * out.k);
        state = sample_categorical(Simplex(std::move(row)), rng);
        sample[static_cast<std::size_t>(l)] = state;
      }
    } else {
      const auto& tg = std::get<TinyGraphSpec>(spec);
      std::vector<bool> community(static_cast<std::size_t>(tg.nodes));
      for (int v = 0; v < tg.nodes; ++v) community[static_cast<std::size_t>(v)] = rng.next_double() < 0.5;
      int slot = 0;
      for (int a = 0; a < tg.nodes; ++a) {
        for (int b = a + 1; b < tg.nodes; ++b) {
          const Simplex dist(tiny_graph_edge_dist(
              community[static_cast<std::size_t>(a)] == community[static_cast<std::size_t>(b)],
              tg.edge_types));
          sample[static_cast<std::size_t>(slot++)] = sample_categorical(dist, rng);
        }
      }
    }
    out.samples.push_back(std::move(sample));
  }
  return out;
}

Simplex estimate_prior(const ToyDataset& dataset) {
  if (dataset.samples.empty()) throw DomainError("estimate_prior: empty dataset");
  std::vector<double> counts(static_cast<std::size_t>(dataset.k), 0.0);
  double total = 0.0;
  for (const std::vector<int>& sample : dataset.samples) {
    for (int c : sample) {
      counts[static_cast<std::size_t>(c)] += 1.0;
      total += 1.0;
    }
  }
  for (double& c : counts) c = (c + 1.0) / (total + dataset.k);
  return Simplex(std::move(counts));
}

Simplex resolve_prior(const PriorSpec& spec, const ToyDataset& dataset) {
  switch (spec.kind) {
    case PriorSpec::Kind::Uniform: return Simplex::uniform(dataset.k);
    case PriorSpec::Kind::Marginal: return estimate_prior(dataset);
  }
  throw DomainError("resolve_prior: unknown prior kind");
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("tv_distance: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

int joint_index(std::span<const int> seq, int k) {
  int idx = 0;
  for (int c : seq) {
    if (c < 0 || c >= k) throw IndexError("joint_index: token out of range");
    idx = idx * k + c;
  }
  return idx;
}

std::vector<double> empirical_joint(std::span<const std::vector<int>> samples, int k, int length) {
  long long states = 1;
  for (int l = 0; l < length; ++l) {
    states *= k;
    if (states > kMaxJointStates) throw CapacityError("empirical_joint: K^L exceeds 4096");
  }
  std::vector<double> hist(static_cast<std::size_t>(states), 0.0);
  if (samples.empty()) throw DomainError("empirical_joint: no samples");
  for (const std::vector<int>& sample : samples) {
    if (static_cast<int>(sample.size()) != length) {
      throw ShapeError("empirical_joint: sample length mismatch");
    }
    hist[static_cast<std::size_t>(joint_index(sample, k))] += 1.0;
  }
  for (double& h : hist) h /= static_cast<double>(samples.size());
  return hist;
}

std::vector<double> exact_joint(const GeneratorSpec& spec) {
  validate_spec(spec);
  const int k = spec_alphabet_size(spec);
  const int length = spec_sequence_length(spec);
  long long states = 1;
  for (int l = 0; l < length; ++l) {
    states *= k;
    if (states > kMaxJointStates) throw CapacityError("exact_joint: K^L exceeds 4096");
  }
  std::vector<double> joint(static_cast<std::size_t>(states), 0.0);

  std::vector<int> seq(static_cast<std::size_t>(length));
  for (long long z = 0; z < states; ++z) {
    long long rest = z;
    for (int l = length - 1; l >= 0; --l) {
      seq[static_cast<std::size_t>(l)] = static_cast<int>(rest % k);
      rest /= k;
    }
    double p = 0.0;
    if (const auto* pm = std::get_if<PointMassSpec>(&spec)) {
      p = (seq == pm->sequence) ? 1.0 : 0.0;
    } else if (const auto* iid = std::get_if<IidSpec>(&spec)) {
      p = 1.0;
      for (int c : seq) p *= iid->probs[c];
    } else if (const auto* mk = std::get_if<MarkovSpec>(&spec)) {
      p = mk->initial[seq[0]];
      for (int l = 1; l < length; ++l) {
        p *= mk->transition[static_cast<std::size_t>(seq[static_cast<std::size_t>(l - 1)] * k +
                                                     seq[static_cast<std::size_t>(l)])];
      }
    } else {
      const auto& tg = std::get<TinyGraphSpec>(spec);
      // Average over the 2^N equiprobable community patterns.
      const int patterns = 1 << tg.nodes;
      for (int mask = 0; mask < patterns; ++mask) {
        double pp = 1.0;
        int slot = 0;
        for (int a = 0; a < tg.nodes && pp > 0.0; ++a) {
          for (int b = a + 1; b < tg.nodes; ++b) {
            const bool same = ((mask >> a) & 1) == ((mask >> b) & 1);
            const std::vector<double> dist = tiny_graph_edge_dist(same, tg.edge_types);
            pp *= dist[static_cast<std::size_t>(seq[static_cast<std::size_t>(slot++)])];
          }
        }
        p += pp / patterns;
      }
    }
    joint[static_cast<std::size_t>(z)] = p;
  }
  return joint;
}

void write_dataset(const std::string& path, const ToyDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw IoError("write_dataset: cannot open " + path);
  out << dataset.k << ' ' << dataset.length << '\n';
  for (const std::vector<int>& sample : dataset.samples) {
    for (std::size_t l = 0; l < sample.size(); ++l) {
      if (l > 0) out << ' ';
      out << sample[l];
    }
    out << '\n';
  }
  if (!out) throw IoError("write_dataset: short write to " + path);
}

ToyDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_dataset: cannot open " + path);
  ToyDataset dataset;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("read_dataset: missing header");
  {
    std::istringstream header(line);
    if (!(header >> dataset.k >> dataset.length) || dataset.k < 2 || dataset.length < 1) {
      throw FormatError("read_dataset: malformed 'K L' header");
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<int> sample;
    sample.reserve(static_cast<std::size_t>(dataset.length));
    int token = 0;
    while (row >> token) {
      if (token < 0 || token >= dataset.k) throw FormatError("read_dataset: token out of range");
      sample.push_back(token);
    }
    if (static_cast<int>(sample.size()) != dataset.length) {
      throw FormatError("read_dataset: sample length differs from header");
    }
    dataset.samples.push_back(std::move(sample));
  }
  return dataset;
}

}  // namespace iddm
