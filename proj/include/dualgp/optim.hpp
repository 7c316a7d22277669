#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

namespace dualgp {

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
};

// Derivative-free simplex minimization (reflection/expansion/contraction/
// shrink with the standard coefficients). Deterministic: the initial simplex
// is x0 plus initial_step along each axis. Stops on max_evals or when the
// simplex collapses below xtol in every coordinate.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double initial_step, int max_evals,
    double xtol = 1e-9);

// Lloyd's algorithm with k-means++ seeding and a fixed iteration count.
// Clusters that empty out are re-seeded to the point farthest from its
// centroid, so exactly k pairwise-distinct centroids come back whenever the
// data has at least k distinct rows.
Eigen::MatrixXd kmeans_centroids(const Eigen::MatrixXd& X, int k,
                                 int lloyd_iters, std::uint64_t seed);

}  // namespace dualgp
