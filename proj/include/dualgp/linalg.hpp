#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dualgp {

struct CholResult {
  Eigen::MatrixXd L;  // lower triangular factor of M + jitter_abs * I
  double jitter_abs;  // absolute jitter actually added (may be zero)
};

// Cholesky with diagonal-jitter escalation. Each ladder entry is relative to
// the mean diagonal of M; levels are tried in order and the first factor that
// succeeds wins. Throws NumericalError naming every attempted level when the
// ladder is exhausted.
CholResult chol_with_jitter(const Eigen::MatrixXd& M,
                            const std::vector<double>& relative_levels);

double min_eigenvalue(const Eigen::MatrixXd& sym);

// Smallest eigenvalue >= -tol * max(1, |largest eigenvalue|).
bool is_psd(const Eigen::MatrixXd& sym, double tol = 1e-8);

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

}  // namespace dualgp
