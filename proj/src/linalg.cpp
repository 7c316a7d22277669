#include "dualgp/linalg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dualgp/errors.hpp"

namespace dualgp {

CholResult chol_with_jitter(const Eigen::MatrixXd& M,
                            const std::vector<double>& relative_levels) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("chol_with_jitter: matrix must be square");
  if (relative_levels.empty())
    throw std::invalid_argument("chol_with_jitter: empty jitter ladder");

  const double scale = M.diagonal().mean();
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (double rel : relative_levels) {
    const double jitter = rel * scale;
    if (jitter == 0.0) {
      llt.compute(M);
    } else {
      Eigen::MatrixXd Mj = M;
      Mj.diagonal().array() += jitter;
      llt.compute(Mj);
    }
    if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
  }

  std::ostringstream msg;
  msg << "Cholesky factorization failed; attempted relative jitter levels:";
  for (double rel : relative_levels) msg << " " << rel;
  msg << " (diagonal scale " << scale << ")";
  throw NumericalError(msg.str());
}

double min_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(sym),
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigenvalue computation failed");
  return es.eigenvalues().minCoeff();
}

bool is_psd(const Eigen::MatrixXd& sym, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(sym),
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigenvalue computation failed");
  const double lo = es.eigenvalues().minCoeff();
  const double hi = std::abs(es.eigenvalues().maxCoeff());
  return lo >= -tol * std::max(1.0, hi);
}

}  // namespace dualgp
