#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "dualgp/acquisition.hpp"
#include "dualgp/dual_svgp.hpp"

namespace dualgp {

// One flat JSON document drives every command. Parsing is strict: unknown
// keys anywhere in the document are rejected so typos surface immediately;
// absent keys fall back to the defaults below.
struct ModelConfig {
  KernelKind kernel = KernelKind::Matern52;
  double variance = 1.0;
  Eigen::VectorXd lengthscales;  // empty = isotropic 1.0 per dimension
  LikelihoodKind likelihood = LikelihoodKind::Gaussian;
  double noise_variance = 0.1;
  int m = 25;
  double jitter = kDefaultJitterRel;

  KernelParams kernel_params(int dim) const;
  Likelihood make_likelihood() const;
};

struct AcquisitionConfig {
  AcquisitionKind kind = AcquisitionKind::ExpectedImprovement;
  int budget = 20;
  bool maximize = true;
};

struct BOConfig {
  int batch_size = 5;
  int iterations = 10;
  int init_size = 0;  // 0 = 3 * dim
  int hyper_max_evals = 100;
};

struct ProblemConfig {
  std::string kind = "banana";  // banana | noisy-branin-disk | csv
  // banana
  int n_per_batch = 100;
  int n_batches = 4;
  // noisy-branin-disk
  double noise_sd = 5.0;
  double flip_prob = 0.05;
  // csv
  std::string path;
  int stream_batch_size = 100;
};

struct ExperimentConfig {
  ModelConfig model;
  FitOptions fit;
  AcquisitionConfig acquisition;
  BOConfig bo;
  ProblemConfig problem;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
};

// Throws ConfigError on unknown keys, bad enum tags, or out-of-range values.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace dualgp
