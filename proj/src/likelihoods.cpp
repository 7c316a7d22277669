#include "dualgp/likelihoods.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "dualgp/errors.hpp"

namespace dualgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
}  // namespace

LikelihoodKind likelihood_kind_from_string(const std::string& tag) {
  if (tag == "gaussian") return LikelihoodKind::Gaussian;
  if (tag == "bernoulli") return LikelihoodKind::BernoulliProbit;
  throw ConfigError("unknown likelihood kind '" + tag +
                    "' (expected \"gaussian\" or \"bernoulli\")");
}

std::string to_string(LikelihoodKind kind) {
  switch (kind) {
    case LikelihoodKind::Gaussian:
      return "gaussian";
    case LikelihoodKind::BernoulliProbit:
      return "bernoulli";
  }
  throw ConfigError("unhandled likelihood kind");
}

Likelihood Likelihood::gaussian(double noise_variance) {
  Likelihood lik;
  lik.kind = LikelihoodKind::Gaussian;
  lik.noise_variance = noise_variance;
  lik.validate();
  return lik;
}

Likelihood Likelihood::bernoulli_probit() {
  Likelihood lik;
  lik.kind = LikelihoodKind::BernoulliProbit;
  return lik;
}

void Likelihood::validate() const {
  if (kind == LikelihoodKind::Gaussian &&
      (!(noise_variance > 0.0) || !std::isfinite(noise_variance)))
    throw std::invalid_argument(
        "Gaussian noise variance must be positive and finite");
}

void Likelihood::validate_observation(double y) const {
  if (!std::isfinite(y))
    throw std::invalid_argument("observations must be finite");
  if (kind == LikelihoodKind::BernoulliProbit && y != 0.0 && y != 1.0)
    throw std::invalid_argument(
        "Bernoulli observations must be exactly 0 or 1 (a -1/+1 encoding is "
        "rejected, not remapped)");
}

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double log_norm_cdf(double z) {
  // erfc underflows near z = -37.5; below that switch to the asymptotic
  // expansion log Phi(z) = -z^2/2 - log(-z) - log(2 pi)/2 + log1p(...).
  if (z > -30.0) return std::log(0.5 * std::erfc(-z * kInvSqrt2));
  const double z2 = z * z;
  const double series = -1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(-z) - 0.5 * kLog2Pi + std::log1p(series);
}

double norm_pdf_cdf_ratio(double z) {
  // exp(log phi - log Phi) is stable in both tails; for z >> 0 it decays to
  // phi(z) and for z << 0 it approaches -z.
  const double log_phi = -0.5 * z * z - 0.5 * kLog2Pi;
  return std::exp(log_phi - log_norm_cdf(z));
}

GaussHermite::GaussHermite(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
  // Golub-Welsch on the symmetric Jacobi matrix of the (physicists') Hermite
  // recurrence: off-diagonal beta_k = sqrt(k/2). Nodes are the eigenvalues;
  // the weight attached to each is the squared first eigenvector component
  // (total mass sqrt(pi), normalized away here).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = std::sqrt(0.5 * k);
    J(k, k - 1) = beta;
    J(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw NumericalError("Gauss-Hermite eigen decomposition failed");
  nodes = es.eigenvalues();
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = v0 * v0;
  }
  weights /= weights.sum();
}

const GaussHermite& default_quadrature() {
  static const GaussHermite table(20);
  return table;
}

namespace {

// d/df and d^2/df^2 of log Phi(s f) for a sign s in {-1, +1}:
//   d/df   = s r(s f)          with r(t) = phi(t) / Phi(t)
//   d^2/df^2 = -r(s f) (s f + r(s f))   (always <= 0; log-concavity)
inline double probit_dlogp(double sign, double f) {
  return sign * norm_pdf_cdf_ratio(sign * f);
}

inline double probit_d2logp(double sign, double f) {
  const double t = sign * f;
  const double r = norm_pdf_cdf_ratio(t);
  return -r * (t + r);
}

}  // namespace

double log_prob(const Likelihood& lik, double y, double f) {
  lik.validate();
  lik.validate_observation(y);
  switch (lik.kind) {
    case LikelihoodKind::Gaussian: {
      const double d = y - f;
      return -0.5 * (kLog2Pi + std::log(lik.noise_variance) +
                     d * d / lik.noise_variance);
    }
    case LikelihoodKind::BernoulliProbit: {
      const double sign = y > 0.5 ? 1.0 : -1.0;
      return log_norm_cdf(sign * f);
    }
  }
  throw ConfigError("unhandled likelihood kind");
}

double expected_log_prob(const Likelihood& lik, double y,
                         const MarginalMoments& moments) {
  lik.validate();
  lik.validate_observation(y);
  if (moments.variance < 0.0 || !std::isfinite(moments.mean) ||
      !std::isfinite(moments.variance))
    throw std::invalid_argument("marginal moments must be finite, variance >= 0");

  switch (lik.kind) {
    case LikelihoodKind::Gaussian: {
      const double d = y - moments.mean;
      return -0.5 * (kLog2Pi + std::log(lik.noise_variance) +
                     (d * d + moments.variance) / lik.noise_variance);
    }
    case LikelihoodKind::BernoulliProbit: {
      const double sign = y > 0.5 ? 1.0 : -1.0;
      if (moments.variance == 0.0) return log_norm_cdf(sign * moments.mean);
      const GaussHermite& q = default_quadrature();
      const double scale = std::sqrt(2.0 * moments.variance);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < q.nodes.size(); ++i)
        acc += q.weights[i] *
               log_norm_cdf(sign * (moments.mean + scale * q.nodes[i]));
      return acc;
    }
  }
  throw ConfigError("unhandled likelihood kind");
}

ExpectationGrads expectation_grads(const Likelihood& lik, double y,
                                   const MarginalMoments& moments) {
  lik.validate();
  lik.validate_observation(y);
  if (moments.variance < 0.0 || !std::isfinite(moments.mean) ||
      !std::isfinite(moments.variance))
    throw std::invalid_argument("marginal moments must be finite, variance >= 0");

  switch (lik.kind) {
    case LikelihoodKind::Gaussian:
      // Quadratic integrand, so the derivatives are exact and independent of
      // the marginal variance.
      return {(y - moments.mean) / lik.noise_variance,
              -0.5 / lik.noise_variance};
    case LikelihoodKind::BernoulliProbit: {
      // Gaussian-expectation derivative identities: the mean derivative is
      // E[(log p)'(f)] and the variance derivative is E[(log p)''(f)] / 2.
      const double sign = y > 0.5 ? 1.0 : -1.0;
      if (moments.variance == 0.0)
        return {probit_dlogp(sign, moments.mean),
                0.5 * probit_d2logp(sign, moments.mean)};
      const GaussHermite& q = default_quadrature();
      const double scale = std::sqrt(2.0 * moments.variance);
      double d1 = 0.0, d2 = 0.0;
      for (Eigen::Index i = 0; i < q.nodes.size(); ++i) {
        const double f = moments.mean + scale * q.nodes[i];
        d1 += q.weights[i] * probit_dlogp(sign, f);
        d2 += q.weights[i] * 0.5 * probit_d2logp(sign, f);
      }
      return {d1, d2};
    }
  }
  throw ConfigError("unhandled likelihood kind");
}

}  // namespace dualgp
