#include "dualgp/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "dualgp/errors.hpp"

namespace dualgp {

KernelKind kernel_kind_from_string(const std::string& tag) {
  if (tag == "matern52") return KernelKind::Matern52;
  if (tag == "rbf") return KernelKind::SquaredExponential;
  throw ConfigError("unknown kernel kind '" + tag +
                    "' (expected \"matern52\" or \"rbf\")");
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Matern52:
      return "matern52";
    case KernelKind::SquaredExponential:
      return "rbf";
  }
  throw ConfigError("unhandled kernel kind");
}

KernelParams KernelParams::isotropic(double variance, double lengthscale,
                                     int dim) {
  KernelParams p;
  p.variance = variance;
  p.lengthscales = Eigen::VectorXd::Constant(dim, lengthscale);
  return p;
}

void KernelParams::validate(int input_dim) const {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw std::invalid_argument("kernel variance must be positive and finite");
  if (lengthscales.size() != input_dim)
    throw std::invalid_argument(
        "expected " + std::to_string(input_dim) + " lengthscales, got " +
        std::to_string(lengthscales.size()));
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    if (!(lengthscales[i] > 0.0) || !std::isfinite(lengthscales[i]))
      throw std::invalid_argument(
          "kernel lengthscales must be positive and finite");
  }
}

namespace {

// Scaled squared distance sum_d ((a_d - b_d) / ell_d)^2, clamped at zero so
// cancellation can never feed a negative into sqrt.
inline double scaled_sqdist(const KernelParams& params,
                            const Eigen::RowVectorXd& a,
                            const Eigen::RowVectorXd& b) {
  const double r2 =
      ((a - b).cwiseQuotient(params.lengthscales.transpose())).squaredNorm();
  return r2 < 0.0 ? 0.0 : r2;
}

inline double eval_from_sqdist(KernelKind kind, double variance, double r2) {
  switch (kind) {
    case KernelKind::Matern52: {
      const double r = std::sqrt(5.0 * r2);
      return variance * (1.0 + r + 5.0 * r2 / 3.0) * std::exp(-r);
    }
    case KernelKind::SquaredExponential:
      return variance * std::exp(-0.5 * r2);
  }
  return 0.0;  // unreachable
}

}  // namespace

double kernel_eval(KernelKind kind, const KernelParams& params,
                   const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  params.validate(static_cast<int>(a.size()));
  if (a.size() != b.size())
    throw std::invalid_argument("kernel inputs have mismatched dimensions");
  return eval_from_sqdist(kind, params.variance, scaled_sqdist(params, a, b));
}

Eigen::MatrixXd gram(KernelKind kind, const KernelParams& params,
                     const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  params.validate(static_cast<int>(X.cols()));
  if (X.cols() != Y.cols())
    throw std::invalid_argument("gram inputs have mismatched dimensions");
  Eigen::MatrixXd K(X.rows(), Y.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < Y.rows(); ++j)
      K(i, j) = eval_from_sqdist(kind, params.variance,
                                 scaled_sqdist(params, X.row(i), Y.row(j)));
  return K;
}

Eigen::MatrixXd gram_sym(KernelKind kind, const KernelParams& params,
                         const Eigen::MatrixXd& X) {
  params.validate(static_cast<int>(X.cols()));
  Eigen::MatrixXd K(X.rows(), X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    K(i, i) = params.variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = eval_from_sqdist(
          kind, params.variance, scaled_sqdist(params, X.row(i), X.row(j)));
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::VectorXd gram_diag(KernelKind kind, const KernelParams& params,
                          const Eigen::MatrixXd& X) {
  params.validate(static_cast<int>(X.cols()));
  return Eigen::VectorXd::Constant(X.rows(), params.variance);
}

}  // namespace dualgp
