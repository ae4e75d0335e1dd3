// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/config.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "iddm/errors.hpp"

namespace iddm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw FormatError("config: trailing junk after number in " + key);
    return v;
  } catch (const FormatError&) {
    throw;
  } catch (...) {
    throw FormatError("config: expected a number for " + key);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw FormatError("config: trailing junk after integer in " + key);
    return v;
  } catch (const FormatError&) {
    throw;
  } catch (...) {
    throw FormatError("config: expected an integer for " + key);
  }
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  return parts;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw FormatError("config line " + std::to_string(line_no) + ": empty key or value");
    }

    if (key == "data.kind") config.data_kind = value;
    else if (key == "data.K") config.data_k = static_cast<int>(parse_int(key, value));
    else if (key == "data.L") config.data_l = static_cast<int>(parse_int(key, value));
    else if (key == "data.n") config.data_n = static_cast<int>(parse_int(key, value));
    else if (key == "data.seed") config.data_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "data.markov_stay") config.data_markov_stay = parse_double(key, value);
    else if (key == "data.point") {
      config.data_point.clear();
      for (const std::string& part : split_commas(value)) {
        config.data_point.push_back(static_cast<int>(parse_int(key, part)));
      }
    } else if (key == "data.iid_probs") {
      config.data_iid_probs.clear();
      for (const std::string& part : split_commas(value)) {
        config.data_iid_probs.push_back(parse_double(key, part));
      }
    } else if (key == "data.nodes") config.data_nodes = static_cast<int>(parse_int(key, value));
    else if (key == "prior.kind") config.prior_kind = value;
    else if (key == "schedule.gamma") config.gamma_kind = value;
    else if (key == "schedule.lambda") config.lambda = parse_double(key, value);
    else if (key == "sampler.rho") config.rho = parse_double(key, value);
    else if (key == "sampler.steps") config.steps = static_cast<int>(parse_int(key, value));
    else if (key == "train.optimizer") config.optimizer = value;
    else if (key == "train.lr") config.lr = parse_double(key, value);
    else if (key == "train.batch") config.batch = static_cast<int>(parse_int(key, value));
    else if (key == "train.steps") config.train_steps = static_cast<int>(parse_int(key, value));
    else if (key == "train.dt_steps") config.dt_steps = static_cast<int>(parse_int(key, value));
    else if (key == "train.warmup") config.warmup = static_cast<int>(parse_int(key, value));
    else if (key == "train.lr_decay") config.lr_decay = parse_double(key, value);
    else if (key == "train.seed") config.train_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "train.log_every") config.log_every = static_cast<int>(parse_int(key, value));
    else if (key == "denoiser.hidden") config.hidden = static_cast<int>(parse_int(key, value));
    else if (key == "denoiser.time_dim") config.time_dim = static_cast<int>(parse_int(key, value));
    else throw FormatError("config line " + std::to_string(line_no) + ": unknown key " + key);
  }
  validate_config(config);
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  out << "data.kind = " << config.data_kind << '\n';
  out << "data.K = " << config.data_k << '\n';
  out << "data.L = " << config.data_l << '\n';
  out << "data.n = " << config.data_n << '\n';
  out << "data.seed = " << config.data_seed << '\n';
  out << "data.markov_stay = " << format_double(config.data_markov_stay) << '\n';
  if (!config.data_point.empty()) {
    out << "data.point = ";
    for (std::size_t i = 0; i < config.data_point.size(); ++i) {
      if (i > 0) out << ',';
      out << config.data_point[i];
    }
    out << '\n';
  }
  if (!config.data_iid_probs.empty()) {
    out << "data.iid_probs = ";
    for (std::size_t i = 0; i < config.data_iid_probs.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(config.data_iid_probs[i]);
    }
    out << '\n';
  }
  out << "data.nodes = " << config.data_nodes << '\n';
  out << "prior.kind = " << config.prior_kind << '\n';
  out << "schedule.gamma = " << config.gamma_kind << '\n';
  out << "schedule.lambda = " << format_double(config.lambda) << '\n';
  out << "sampler.rho = " << format_double(config.rho) << '\n';
  out << "sampler.steps = " << config.steps << '\n';
  out << "train.optimizer = " << config.optimizer << '\n';
  out << "train.lr = " << format_double(config.lr) << '\n';
  out << "train.batch = " << config.batch << '\n';
  out << "train.steps = " << config.train_steps << '\n';
  out << "train.dt_steps = " << config.dt_steps << '\n';
  out << "train.warmup = " << config.warmup << '\n';
  out << "train.lr_decay = " << format_double(config.lr_decay) << '\n';
  out << "train.seed = " << config.train_seed << '\n';
  out << "train.log_every = " << config.log_every << '\n';
  out << "denoiser.hidden = " << config.hidden << '\n';
  out << "denoiser.time_dim = " << config.time_dim << '\n';
  return out.str();
}

GeneratorSpec make_generator_spec(const RunConfig& config) {
  if (config.data_kind == "pointmass") {
    PointMassSpec spec;
    spec.k = config.data_k;
    spec.sequence = config.data_point;
    if (spec.sequence.empty()) {
      spec.sequence.assign(static_cast<std::size_t>(config.data_l), 0);
    }
    return spec;
  }
  if (config.data_kind == "iid") {
    IidSpec spec;
    spec.length = config.data_l;
    spec.probs = config.data_iid_probs.empty() ? Simplex::uniform(config.data_k)
                                               : Simplex(config.data_iid_probs);
    return spec;
  }
  if (config.data_kind == "markov") {
    MarkovSpec spec;
    spec.length = config.data_l;
    spec.initial = Simplex::uniform(config.data_k);
    const int k = config.data_k;
    const double stay = config.data_markov_stay;
    if (!(stay > 0.0 && stay < 1.0)) throw DomainError("config: data.markov_stay must be in (0,1)");
    spec.transition.assign(static_cast<std::size_t>(k * k), (1.0 - stay) / (k - 1));
    for (int i = 0; i < k; ++i) spec.transition[static_cast<std::size_t>(i * k + i)] = stay;
    return spec;
  }
  if (config.data_kind == "tinygraph") {
    TinyGraphSpec spec;
    spec.nodes = config.data_nodes;
    spec.edge_types = config.data_k;
    return spec;
  }
  throw FormatError("config: unknown data.kind " + config.data_kind);
}

PriorSpec make_prior_spec(const RunConfig& config) {
  PriorSpec spec;
  if (config.prior_kind == "uniform") spec.kind = PriorSpec::Kind::Uniform;
  else if (config.prior_kind == "marginal") spec.kind = PriorSpec::Kind::Marginal;
  else throw FormatError("config: unknown prior.kind " + config.prior_kind);
  return spec;
}

void validate_config(const RunConfig& config) {
  if (config.gamma_kind != "linear") {
    throw FormatError("config: unknown schedule.gamma " + config.gamma_kind);
  }
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0)) {
    throw DomainError("config: schedule.lambda must lie in [0,1]");
  }
  if (!(config.rho >= 1.0)) throw DomainError("config: sampler.rho must be >= 1");
  if (config.steps < 1) throw DomainError("config: sampler.steps must be >= 1");
  if (config.data_k < 2) throw DomainError("config: data.K must be >= 2");
  if (config.data_l < 1) throw DomainError("config: data.L must be >= 1");
  if (config.data_n < 1) throw DomainError("config: data.n must be >= 1");
  if (config.optimizer != "adam" && config.optimizer != "sgd") {
    throw FormatError("config: unknown train.optimizer " + config.optimizer);
  }
  if (!(config.lr > 0.0)) throw DomainError("config: train.lr must be positive");
  if (config.batch < 1) throw DomainError("config: train.batch must be >= 1");
  if (config.train_steps < 0) throw DomainError("config: train.steps must be >= 0");
  if (config.dt_steps < 1) throw DomainError("config: train.dt_steps must be >= 1");
  if (config.warmup < 0) throw DomainError("config: train.warmup must be >= 0");
  if (!(config.lr_decay > 0.0 && config.lr_decay <= 1.0)) {
    throw DomainError("config: train.lr_decay must lie in (0,1]");
  }
  if (config.log_every < 1) throw DomainError("config: train.log_every must be >= 1");
  if (config.hidden < 1) throw DomainError("config: denoiser.hidden must be >= 1");
  if (config.time_dim < 2 || config.time_dim % 2 != 0) {
    throw DomainError("config: denoiser.time_dim must be a positive even number");
  }
  make_generator_spec(config);
  make_prior_spec(config);
}

}  // namespace iddm
