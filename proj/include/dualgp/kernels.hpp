#pragma once

#include <Eigen/Core>
#include <string>

namespace dualgp {

enum class KernelKind { Matern52, SquaredExponential };

// Throws ConfigError on an unknown tag. Accepted tags: "matern52", "rbf".
KernelKind kernel_kind_from_string(const std::string& tag);
std::string to_string(KernelKind kind);

// Stationary ARD kernel hyperparameters: one signal variance plus one
// lengthscale per input dimension. All entries must be strictly positive.
struct KernelParams {
  double variance = 1.0;
  Eigen::VectorXd lengthscales;

  static KernelParams isotropic(double variance, double lengthscale, int dim);

  // Throws std::invalid_argument on non-positive entries or a lengthscale
  // count that does not match input_dim.
  void validate(int input_dim) const;
};

double kernel_eval(KernelKind kind, const KernelParams& params,
                   const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b);

// Cross-covariance, entry (i, j) = k(X.row(i), Y.row(j)). Rows are points.
Eigen::MatrixXd gram(KernelKind kind, const KernelParams& params,
                     const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

// Gram of X against itself, mirrored from the lower triangle so the result is
// exactly symmetric with k(x, x) = variance on the diagonal.
Eigen::MatrixXd gram_sym(KernelKind kind, const KernelParams& params,
                         const Eigen::MatrixXd& X);

// Marginal prior variances k(x_i, x_i); constant for stationary kernels.
Eigen::VectorXd gram_diag(KernelKind kind, const KernelParams& params,
                          const Eigen::MatrixXd& X);

}  // namespace dualgp
