#include "dualgp/dual_svgp.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "dualgp/errors.hpp"
#include "dualgp/linalg.hpp"

namespace dualgp {

namespace {

// Ladder for K_zz: the configured level first, then the escalation rungs.
std::vector<double> kzz_ladder(double jitter_rel) {
  std::vector<double> ladder{jitter_rel};
  for (double rel : {1e-4, 1e-2})
    if (rel > jitter_rel) ladder.push_back(rel);
  return ladder;
}

// B = I + L^T Lambda L is unit-diagonal dominated, so the first attempt is
// unjittered; escalation only kicks in on genuine round-off trouble.
const std::vector<double> kBLadder{0.0, 1e-6, 1e-4, 1e-2};

Eigen::MatrixXd chol_B(const DualState& s) {
  const Eigen::MatrixXd LtLamL = s.Kzz_chol.transpose() * s.Lambda * s.Kzz_chol;
  Eigen::MatrixXd B = symmetrize(LtLamL);
  B.diagonal().array() += 1.0;
  return chol_with_jitter(B, kBLadder).L;
}

void check_data(const DualState& s, const Dataset& data) {
  data.validate();
  if (data.n() == 0) throw std::invalid_argument("dataset is empty");
  if (data.dim() != s.dim())
    throw std::invalid_argument("data dimension " + std::to_string(data.dim()) +
                                " does not match inducing dimension " +
                                std::to_string(s.dim()));
  for (Eigen::Index i = 0; i < data.n(); ++i)
    s.lik.validate_observation(data.y[i]);
}

struct NatGradTerms {
  Eigen::VectorXd g1;  // A^T (d1 - 2 d2 .* mu_f)
  Eigen::MatrixXd G2;  // -2 A^T diag(d2) A, symmetric PSD
};

// Gradient quantities at the state's current posterior marginals over the
// data inputs. Shared verbatim by natgrad_step and dual_condition; the two
// differ only in how the result is blended into (lambda, Lambda).
NatGradTerms natgrad_terms(const DualState& s, const Dataset& data) {
  const Prediction marg = predict(s, data.X, false);

  const Eigen::Index n = data.n();
  Eigen::VectorXd d1(n), d2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ExpectationGrads g = expectation_grads(
        s.lik, data.y[i], MarginalMoments{marg.mean[i], marg.variance[i]});
    d1[i] = g.d1;
    d2[i] = g.d2;
  }

  // A = K_xz K_zz^-1 via two triangular solves against the cached factor.
  const Eigen::MatrixXd Kzx =
      gram(s.kind, s.params, s.inducing.Z, data.X);  // m x n
  const Eigen::MatrixXd tmp =
      s.Kzz_chol.triangularView<Eigen::Lower>().solve(Kzx);
  const Eigen::MatrixXd At =
      s.Kzz_chol.transpose().triangularView<Eigen::Upper>().solve(tmp);  // = A^T, m x n

  NatGradTerms t;
  t.g1 = At * (d1 - 2.0 * d2.cwiseProduct(marg.mean));
  t.G2 = symmetrize(At * (-2.0 * d2).asDiagonal() * At.transpose());
  return t;
}

void check_lambda_psd(const Eigen::MatrixXd& Lambda) {
  if (!is_psd(Lambda, 1e-8))
    throw NumericalError(
        "dual precision matrix lost positive semidefiniteness "
        "(smallest eigenvalue " +
        std::to_string(min_eigenvalue(Lambda)) + ")");
}

}  // namespace

InducingSet::InducingSet(Eigen::MatrixXd Z_in) : Z(std::move(Z_in)) {
  if (Z.rows() < 1)
    throw std::invalid_argument("inducing set must contain at least one point");
  if (!Z.allFinite())
    throw std::invalid_argument("inducing points must be finite");
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if ((Z.row(i) - Z.row(j)).norm() == 0.0)
        throw std::invalid_argument(
            "inducing points must be pairwise distinct (rows " +
            std::to_string(j) + " and " + std::to_string(i) + " coincide)");
}

DualState make_state(KernelKind kind, const KernelParams& params,
                     const Likelihood& lik, InducingSet inducing,
                     double jitter_rel) {
  params.validate(inducing.dim());
  lik.validate();
  if (!(jitter_rel >= 0.0) || !std::isfinite(jitter_rel))
    throw std::invalid_argument("jitter must be non-negative and finite");

  DualState s;
  s.kind = kind;
  s.params = params;
  s.lik = lik;
  s.inducing = std::move(inducing);
  s.lambda = Eigen::VectorXd::Zero(s.m());
  s.Lambda = Eigen::MatrixXd::Zero(s.m(), s.m());
  s.jitter_rel = jitter_rel;

  const Eigen::MatrixXd Kzz = gram_sym(kind, params, s.inducing.Z);
  const CholResult chol = chol_with_jitter(Kzz, kzz_ladder(jitter_rel));
  s.Kzz_chol = chol.L;
  s.jitter_abs = chol.jitter_abs;
  return s;
}

DualState clone_state(const DualState& state) { return state; }

MomentState to_moments(const DualState& state) {
  const Eigen::MatrixXd LB = chol_B(state);
  // V* = L B^-1 L^T = W^T W with W = LB^-1 L^T; symmetric PD by construction.
  const Eigen::MatrixXd W = LB.triangularView<Eigen::Lower>().solve(
      state.Kzz_chol.transpose());
  MomentState ms;
  ms.V_star = W.transpose() * W;
  ms.m_star = ms.V_star * state.lambda;
  return ms;
}

Prediction predict(const DualState& state, const Eigen::MatrixXd& Xtest,
                   bool full_cov) {
  if (Xtest.cols() != state.dim())
    throw std::invalid_argument(
        "test inputs have dimension " + std::to_string(Xtest.cols()) +
        ", inducing points have " + std::to_string(state.dim()));

  const Eigen::MatrixXd LB = chol_B(state);
  const Eigen::MatrixXd Kzx =
      gram(state.kind, state.params, state.inducing.Z, Xtest);  // m x n

  // U = L^-1 K_zx and W = LB^-1 U give the two covariance corrections:
  //   A K_zz A^T = U^T U,   A V* A^T = W^T W.
  const Eigen::MatrixXd U =
      state.Kzz_chol.triangularView<Eigen::Lower>().solve(Kzx);
  const Eigen::MatrixXd W = LB.triangularView<Eigen::Lower>().solve(U);

  // mean = A m* = U^T s with s = L^-1 m* = B^-1 L^T lambda.
  const Eigen::VectorXd Ltl = state.Kzz_chol.transpose() * state.lambda;
  const Eigen::VectorXd s = LB.transpose().triangularView<Eigen::Upper>().solve(
      LB.triangularView<Eigen::Lower>().solve(Ltl));

  Prediction pred;
  pred.mean = U.transpose() * s;

  const Eigen::VectorXd kdiag = gram_diag(state.kind, state.params, Xtest);
  pred.variance = kdiag - U.colwise().squaredNorm().transpose() +
                  W.colwise().squaredNorm().transpose();
  for (Eigen::Index i = 0; i < pred.variance.size(); ++i) {
    if (pred.variance[i] < 0.0) {
      pred.variance[i] = 0.0;
      ++pred.clamped;
    }
  }

  if (full_cov) {
    const Eigen::MatrixXd Kxx = gram_sym(state.kind, state.params, Xtest);
    pred.cov = symmetrize(Kxx - U.transpose() * U + W.transpose() * W);
  }
  return pred;
}

Eigen::VectorXd predict_y(const DualState& state, const Eigen::MatrixXd& Xtest) {
  const Prediction pred = predict(state, Xtest, false);
  if (state.lik.kind == LikelihoodKind::Gaussian) return pred.mean;
  // Probit class probability under a Gaussian latent: Phi(mu / sqrt(1+s2)).
  Eigen::VectorXd p(pred.mean.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    p[i] = norm_cdf(pred.mean[i] / std::sqrt(1.0 + pred.variance[i]));
  return p;
}

DualState natgrad_step(const DualState& state, const Dataset& data,
                       double rho) {
  if (!(rho >= 0.0) || rho > 1.0)
    throw std::invalid_argument("step size must lie in [0, 1]");
  check_data(state, data);
  if (rho == 0.0) return state;

  const NatGradTerms t = natgrad_terms(state, data);
  DualState out = state;
  out.lambda = (1.0 - rho) * state.lambda + rho * t.g1;
  out.Lambda = symmetrize((1.0 - rho) * state.Lambda + rho * t.G2);
  check_lambda_psd(out.Lambda);
  return out;
}

FitResult fit(const DualState& state, const Dataset& data,
              const FitOptions& options) {
  if (options.max_iters < 0)
    throw std::invalid_argument("max_iters must be >= 0");
  check_data(state, data);

  FitResult result;
  if (state.lik.kind == LikelihoodKind::Gaussian) {
    // Conjugate case: one full step lands on the optimum from any state.
    result.state = natgrad_step(state, data, 1.0);
    result.converged = true;
    result.iterations = 1;
    if (options.record_elbo)
      result.elbo_trace.push_back(elbo(result.state, data));
    return result;
  }

  DualState current = state;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    DualState next = natgrad_step(current, data, options.rho);
    const double dl =
        (next.lambda - current.lambda).norm() / (1.0 + current.lambda.norm());
    const double dL =
        (next.Lambda - current.Lambda).norm() / (1.0 + current.Lambda.norm());
    current = std::move(next);
    ++result.iterations;
    if (options.record_elbo) result.elbo_trace.push_back(elbo(current, data));
    if (dl < options.tol && dL < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.state = std::move(current);
  return result;
}

DualState dual_condition(const DualState& state, const Dataset& new_data) {
  check_data(state, new_data);
  const NatGradTerms t = natgrad_terms(state, new_data);
  DualState out = state;
  out.lambda = state.lambda + t.g1;
  out.Lambda = symmetrize(state.Lambda + t.G2);
  check_lambda_psd(out.Lambda);
  return out;
}

double elbo(const DualState& state, const Dataset& data) {
  check_data(state, data);

  const Prediction marg = predict(state, data.X, false);
  double fit_term = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    fit_term += expected_log_prob(
        state.lik, data.y[i], MarginalMoments{marg.mean[i], marg.variance[i]});

  // KL(q(u) || N(0, K_zz)) via the B factor:
  //   tr(K_zz^-1 V*) = tr(B^-1),  logdet K_zz - logdet V* = logdet B,
  //   m*^T K_zz^-1 m* = ||L^-1 m*||^2 = ||B^-1 L^T lambda||^2.
  const Eigen::MatrixXd LB = chol_B(state);
  const Eigen::Index m = state.m();
  const Eigen::MatrixXd LBinv = LB.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(m, m));
  const double trace_Binv = LBinv.squaredNorm();
  const Eigen::VectorXd Ltl = state.Kzz_chol.transpose() * state.lambda;
  const Eigen::VectorXd s = LB.transpose().triangularView<Eigen::Upper>().solve(
      LB.triangularView<Eigen::Lower>().solve(Ltl));
  const double logdet_B = 2.0 * LB.diagonal().array().log().sum();
  const double kl = 0.5 * (trace_Binv + s.squaredNorm() -
                           static_cast<double>(m) + logdet_B);

  return fit_term - kl;
}

}  // namespace dualgp
