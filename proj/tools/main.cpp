// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "iddm/threading.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iddm: interpolating discrete diffusion toolkit"};
  app.require_subcommand(1);

  int threads_flag = 0;  // 0 = use IDDM_THREADS or 1
  app.add_option("--threads", threads_flag, "worker threads (env IDDM_THREADS)");

  // verify
  auto* verify = app.add_subcommand("verify", "run the distributional identity suite");
  long long trials = 10000;
  std::uint64_t verify_seed = 0;
  bool inject_fault = false;
  verify->add_option("--trials", trials, "random tuples per identity");
  verify->add_option("--seed", verify_seed, "rng seed");
  verify->add_flag("--inject-fault", inject_fault, "test hook: corrupt weights, expect failure");

  // train
  auto* train = app.add_subcommand("train", "train a denoiser from a config file");
  std::string train_config;
  std::string train_out;
  train->add_option("--config", train_config, "config path")->required();
  train->add_option("--out", train_out, "checkpoint output path")->required();

  // sample
  auto* sample = app.add_subcommand("sample", "generate sequences from a checkpoint");
  iddm::cli::SampleOptions sample_options;
  double sample_lambda = -1.0, sample_rho = -1.0;
  int sample_steps = -1;
  sample->add_option("--ckpt", sample_options.checkpoint_path)->required();
  sample->add_option("--n", sample_options.n)->required();
  sample->add_option("--lambda", sample_lambda, "resampling strength (default: config)");
  sample->add_option("--rho", sample_rho, "time distortion exponent (default: config)");
  sample->add_option("--steps", sample_steps, "grid steps (default: config)");
  sample->add_option("--seed", sample_options.seed);
  sample->add_option("--out", sample_options.out_path)->required();

  // elbo
  auto* elbo = app.add_subcommand("elbo", "evaluate nats-per-token and perplexity");
  iddm::cli::ElboOptions elbo_options;
  double elbo_lambda = -1.0;
  elbo->add_option("--ckpt", elbo_options.checkpoint_path)->required();
  elbo->add_option("--data", elbo_options.data_path)->required();
  elbo->add_option("--lambda", elbo_lambda, "resampling strength (default: config)");
  elbo->add_option("--steps", elbo_options.steps);
  elbo->add_option("--mc", elbo_options.n_mc);
  elbo->add_option("--seed", elbo_options.seed);
  elbo->add_flag("--perfect-predictor", elbo_options.perfect_predictor,
                 "test hook: score with the data-conditioned perfect predictor");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid evaluation over lambda x rho x steps");
  iddm::cli::SweepOptions sweep_options;
  std::string lambdas_csv = "0", rhos_csv = "4", steps_csv = "32";
  sweep->add_option("--ckpt", sweep_options.checkpoint_path)->required();
  sweep->add_option("--lambdas", lambdas_csv, "comma list");
  sweep->add_option("--rhos", rhos_csv, "comma list");
  sweep->add_option("--steps", steps_csv, "comma list");
  sweep->add_option("--n", sweep_options.n, "chains per cell");
  sweep->add_option("--seed", sweep_options.seed);

  CLI11_PARSE(app, argc, argv);
  const int threads = iddm::resolve_threads(threads_flag);

  try {
    if (*verify) {
      iddm::cli::VerifyOptions options;
      options.trials = trials;
      options.seed = verify_seed;
      options.threads = threads;
      options.inject_fault = inject_fault ? 1e-6 : 0.0;
      const auto result = iddm::cli::cmd_verify(options, std::cout);
      return result.pass ? 0 : 1;
    }
    if (*train) {
      const iddm::RunConfig config = iddm::parse_config_file(train_config);
      iddm::cli::cmd_train(config, train_out, std::cout, threads);
      return 0;
    }
    if (*sample) {
      if (sample_lambda >= 0.0) sample_options.lambda = sample_lambda;
      if (sample_rho >= 0.0) sample_options.rho = sample_rho;
      if (sample_steps >= 0) sample_options.steps = sample_steps;
      sample_options.threads = threads;
      iddm::cli::cmd_sample(sample_options, std::cout);
      return 0;
    }
    if (*elbo) {
      if (elbo_lambda >= 0.0) elbo_options.lambda = elbo_lambda;
      iddm::cli::cmd_elbo(elbo_options, std::cout);
      return 0;
    }
    if (*sweep) {
      sweep_options.lambdas = parse_double_list(lambdas_csv);
      sweep_options.rhos = parse_double_list(rhos_csv);
      sweep_options.steps = parse_int_list(steps_csv);
      sweep_options.threads = threads;
      std::cout << iddm::cli::cmd_sweep(sweep_options);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
