#pragma once

#include <Eigen/Core>
#include <string>

namespace dualgp {

enum class LikelihoodKind { Gaussian, BernoulliProbit };

LikelihoodKind likelihood_kind_from_string(const std::string& tag);
std::string to_string(LikelihoodKind kind);

struct Likelihood {
  LikelihoodKind kind = LikelihoodKind::Gaussian;
  double noise_variance = 1.0;  // Gaussian only; ignored by Bernoulli

  static Likelihood gaussian(double noise_variance);
  static Likelihood bernoulli_probit();

  void validate() const;
  // Throws std::invalid_argument when y is outside the likelihood's domain.
  // Bernoulli observations must be exactly 0 or 1; the message calls out the
  // +/-1 encoding specifically since it is the common source of bad labels.
  void validate_observation(double y) const;
};

// Gaussian marginal of the latent function at a single input.
struct MarginalMoments {
  double mean = 0.0;
  double variance = 0.0;  // >= 0; zero means a point mass
};

struct ExpectationGrads {
  double d1;  // d/dmean   of expected_log_prob
  double d2;  // d/dvariance of expected_log_prob, <= 0 for both likelihoods
};

double log_prob(const Likelihood& lik, double y, double f);

// E[log p(y | f)] under f ~ N(moments). Closed form for Gaussian; Bernoulli
// uses the shared Gauss-Hermite table.
double expected_log_prob(const Likelihood& lik, double y,
                         const MarginalMoments& moments);

ExpectationGrads expectation_grads(const Likelihood& lik, double y,
                                   const MarginalMoments& moments);

// --- standard-normal helpers, shared with the acquisition module ---

double norm_pdf(double z);
double norm_cdf(double z);
// log Phi(z), accurate into the deep left tail (z ~ -300 stays finite).
double log_norm_cdf(double z);
// phi(z) / Phi(z); tends to -z as z -> -inf without overflow.
double norm_pdf_cdf_ratio(double z);

// Gauss-Hermite rule adapted to Gaussian expectations: for f ~ N(mu, s2),
// E[g(f)] ~= sum_i weights[i] * g(mu + sqrt(2 s2) * nodes[i]); the 1/sqrt(pi)
// normalization is already folded into the weights, which sum to one.
struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  explicit GaussHermite(int n);
};

// Shared immutable 20-node table used by the Bernoulli expectations.
const GaussHermite& default_quadrature();

}  // namespace dualgp
