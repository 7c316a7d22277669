#pragma once

// Small shared builders for randomized test instances.

#include <Eigen/Dense>
#include <random>

#include "dualgp/data_io.hpp"
#include "dualgp/dual_svgp.hpp"

namespace testing_helpers {

inline Eigen::MatrixXd random_matrix(int n, int d, std::uint64_t seed,
                                     double spread = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, spread);
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = g(rng);
  return X;
}

struct RegressionInstance {
  dualgp::Dataset data;
  Eigen::MatrixXd Z;
  dualgp::KernelParams params;
  double noise_var = 0.0;
};

// Random Gaussian-likelihood instance with well-spread inputs and moderate
// hyperparameters, sized (n, m, d).
inline RegressionInstance random_regression(int n, int m, int d,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::uniform_real_distribution<double> uvar(0.4, 3.0);
  std::uniform_real_distribution<double> uls(0.5, 2.0);
  std::uniform_real_distribution<double> unoise(0.05, 0.8);
  std::normal_distribution<double> g(0.0, 1.0);

  RegressionInstance inst;
  inst.params.variance = uvar(rng);
  inst.params.lengthscales.resize(d);
  for (int j = 0; j < d; ++j) inst.params.lengthscales[j] = uls(rng);
  inst.noise_var = unoise(rng);

  const Eigen::MatrixXd X = random_matrix(n, d, seed * 31 + 1, 1.5);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = std::sin(1.7 * X(i, 0)) + 0.3 * g(rng);
  inst.data = dualgp::make_dataset(X, y, dualgp::OutputDomain::Real);
  inst.Z = random_matrix(m, d, seed * 31 + 2, 1.5);
  return inst;
}

inline dualgp::DualState fresh_state(const RegressionInstance& inst,
                                     dualgp::KernelKind kind,
                                     double jitter_rel = dualgp::kDefaultJitterRel) {
  return dualgp::make_state(kind, inst.params,
                            dualgp::Likelihood::gaussian(inst.noise_var),
                            dualgp::InducingSet(inst.Z), jitter_rel);
}

// Random Bernoulli instance: labels from a thresholded smooth function.
inline dualgp::Dataset random_classification(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xc1a55ULL);
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::MatrixXd X = random_matrix(n, d, seed * 17 + 3, 1.5);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i)
    y[i] = (std::sin(2.0 * X(i, 0)) + 0.5 * g(rng) > 0.0) ? 1.0 : 0.0;
  return dualgp::make_dataset(X, y, dualgp::OutputDomain::Binary);
}

}  // namespace testing_helpers
