#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dualgp/data_io.hpp"
#include "dualgp/kernels.hpp"
#include "dualgp/likelihoods.hpp"

namespace dualgp {

inline constexpr double kDefaultJitterRel = 1e-6;

// Inducing inputs; rows are points. Pairwise distinct.
struct InducingSet {
  Eigen::MatrixXd Z;

  InducingSet() = default;
  explicit InducingSet(Eigen::MatrixXd Z_in);  // validates

  Eigen::Index m() const { return Z.rows(); }
  int dim() const { return static_cast<int>(Z.cols()); }
};

// Sparse variational GP in dual form. The variational posterior over the
// inducing outputs, q(u) = N(m*, V*), is carried indirectly by the pair
// (lambda, Lambda):
//
//   V* = (K_zz^-1 + Lambda)^-1,   m* = V* lambda,
//
// which makes conditioning on new data a pure addition to (lambda, Lambda)
// while Z and the kernel hyperparameters stay fixed. All internal algebra
// goes through the stabilized factors L L^T = K_zz + jitter I and
// B = I + L^T Lambda L, never through an explicit K_zz^-1.
//
// States are immutable from the caller's perspective: every operation
// returns a new state, so sharing one across threads for prediction is safe.
struct DualState {
  KernelKind kind = KernelKind::Matern52;
  KernelParams params;
  Likelihood lik;
  InducingSet inducing;
  Eigen::VectorXd lambda;   // m
  Eigen::MatrixXd Lambda;   // m x m, symmetric PSD
  Eigen::MatrixXd Kzz_chol; // lower factor of K_zz + jitter_abs I
  double jitter_rel = kDefaultJitterRel;  // first rung of the jitter ladder
  double jitter_abs = 0.0;  // jitter actually folded into Kzz_chol

  Eigen::Index m() const { return inducing.m(); }
  int dim() const { return inducing.dim(); }
};

// Builds a fresh state (lambda = 0, Lambda = 0) and factors K_zz. The
// relative jitter is taken against the mean diagonal (= kernel variance).
DualState make_state(KernelKind kind, const KernelParams& params,
                     const Likelihood& lik, InducingSet inducing,
                     double jitter_rel = kDefaultJitterRel);

DualState clone_state(const DualState& state);

struct MomentState {
  Eigen::VectorXd m_star;
  Eigen::MatrixXd V_star;  // symmetric PD
};

// (m*, V*) of q(u), via V* = L B^-1 L^T.
MomentState to_moments(const DualState& state);

struct Prediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;            // marginals, clamped at 0 from below
  std::optional<Eigen::MatrixXd> cov;  // full covariance, on request
  int clamped = 0;  // count of marginal variances clipped up to zero
};

// Latent posterior at Xtest: mean = A m*, cov = K_xx - A K_zz A^T + A V* A^T
// with A = K_xz K_zz^-1 (K_zz jittered as in the state's cached factor).
Prediction predict(const DualState& state, const Eigen::MatrixXd& Xtest,
                   bool full_cov = false);

// Predictive mean of the observation: the latent mean for Gaussian noise
// (noise variance lives in state.lik), Phi(mu / sqrt(1 + sigma^2)) for the
// probit Bernoulli class probability.
Eigen::VectorXd predict_y(const DualState& state, const Eigen::MatrixXd& Xtest);

// One damped natural-gradient pass over the data. With A = K_xz K_zz^-1 and
// per-point (d1, d2) = expectation_grads at the current latent marginals:
//
//   lambda <- (1-rho) lambda + rho A^T (d1 - 2 d2 .* mu_f)
//   Lambda <- (1-rho) Lambda + rho (-2) A^T diag(d2) A
//
// The -2 factor and the mu_f correction convert per-point moment derivatives
// into expectation-parameter gradients; with a Gaussian likelihood a single
// rho = 1 step lands exactly on the optimum from any starting state.
DualState natgrad_step(const DualState& state, const Dataset& data, double rho);

struct FitOptions {
  int max_iters = 100;
  double rho = 0.5;  // constant step size; conjugate fits ignore it
  double tol = 1e-6;
  bool record_elbo = false;
};

struct FitResult {
  DualState state;
  bool converged = false;
  int iterations = 0;
  std::vector<double> elbo_trace;  // post-step ELBO, when recorded
};

// Iterates natgrad_step until both relative parameter deltas fall below tol
// or max_iters is hit (converged flag false, no exception). Gaussian
// likelihoods short-circuit to the single exact rho = 1 step.
FitResult fit(const DualState& state, const Dataset& data,
              const FitOptions& options = {});

// One-step conditioning on new data only, at fixed Z and hyperparameters:
// the natural-gradient quantities of natgrad_step, evaluated under the
// CURRENT posterior marginals, are added onto (lambda, Lambda). Cost
// O(n_new m^2 + m^3); old data is never revisited. For Gaussian likelihoods
// this is exact: conditioning commutes and matches a joint refit.
DualState dual_condition(const DualState& state, const Dataset& new_data);

// Sum of expected log likelihood terms at the data marginals minus the
// closed-form KL(q(u) || N(0, K_zz)). Fresh states have KL exactly 0.
double elbo(const DualState& state, const Dataset& data);

}  // namespace dualgp
