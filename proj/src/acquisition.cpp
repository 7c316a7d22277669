#include "dualgp/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dualgp/errors.hpp"
#include "dualgp/lowdisc.hpp"
#include "dualgp/optim.hpp"
#include "dualgp/rng.hpp"

namespace dualgp {

AcquisitionKind acquisition_kind_from_string(const std::string& tag) {
  if (tag == "ei") return AcquisitionKind::ExpectedImprovement;
  if (tag == "success_prob") return AcquisitionKind::SuccessProbability;
  if (tag == "ei_x_success") return AcquisitionKind::ProductEISuccess;
  throw ConfigError("unknown acquisition kind '" + tag +
                    "' (expected \"ei\", \"success_prob\", or \"ei_x_success\")");
}

std::string to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::ExpectedImprovement:
      return "ei";
    case AcquisitionKind::SuccessProbability:
      return "success_prob";
    case AcquisitionKind::ProductEISuccess:
      return "ei_x_success";
  }
  throw ConfigError("unhandled acquisition kind");
}

namespace {

constexpr double kDegenerateSigma = 1e-12;

double ei_from_moments(double mean, double variance, double incumbent,
                       bool maximize) {
  // Internally everything is the maximization convention; minimization just
  // flips the sign of the improvement direction.
  const double dir = maximize ? 1.0 : -1.0;
  const double delta = dir * (mean - incumbent);
  const double sigma = std::sqrt(std::max(variance, 0.0));
  if (!(sigma >= kDegenerateSigma)) return std::max(delta, 0.0);
  const double z = delta / sigma;
  // Deep left tail: the closed form underflows to zero (and naively evaluated
  // would produce inf * 0 for z = -inf, e.g. an infinite incumbent).
  if (z < -38.0) return 0.0;
  return sigma * (z * norm_cdf(z) + norm_pdf(z));
}

void require_regression(const SurrogateModels& models) {
  if (models.regression == nullptr)
    throw ConfigError("acquisition requires a regression surrogate");
  if (models.regression->lik.kind != LikelihoodKind::Gaussian)
    throw ConfigError("expected improvement needs a Gaussian-likelihood surrogate");
}

void require_classification(const SurrogateModels& models) {
  if (models.classification == nullptr)
    throw ConfigError("acquisition requires a classification surrogate");
  if (models.classification->lik.kind != LikelihoodKind::BernoulliProbit)
    throw ConfigError("success probability needs a Bernoulli-likelihood surrogate");
}

}  // namespace

double expected_improvement(const DualState& reg_state,
                            const Eigen::RowVectorXd& x, double incumbent,
                            bool maximize) {
  if (reg_state.lik.kind != LikelihoodKind::Gaussian)
    throw ConfigError("expected improvement needs a Gaussian-likelihood surrogate");
  const Prediction p = predict(reg_state, x, false);
  return ei_from_moments(p.mean[0], p.variance[0], incumbent, maximize);
}

double success_probability(const DualState& clf_state,
                           const Eigen::RowVectorXd& x) {
  if (clf_state.lik.kind != LikelihoodKind::BernoulliProbit)
    throw ConfigError("success probability needs a Bernoulli-likelihood surrogate");
  return predict_y(clf_state, x)[0];
}

Eigen::VectorXd eval_acquisition_batch(const AcquisitionSpec& spec,
                                       const SurrogateModels& models,
                                       const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd values(n);

  switch (spec.kind) {
    case AcquisitionKind::ExpectedImprovement: {
      require_regression(models);
      const Prediction p = predict(*models.regression, X, false);
      for (Eigen::Index i = 0; i < n; ++i)
        values[i] = ei_from_moments(p.mean[i], p.variance[i], spec.incumbent,
                                    spec.maximize);
      return values;
    }
    case AcquisitionKind::SuccessProbability: {
      require_classification(models);
      return predict_y(*models.classification, X);
    }
    case AcquisitionKind::ProductEISuccess: {
      require_regression(models);
      require_classification(models);
      const Prediction p = predict(*models.regression, X, false);
      const Eigen::VectorXd prob = predict_y(*models.classification, X);
      for (Eigen::Index i = 0; i < n; ++i)
        values[i] = prob[i] * ei_from_moments(p.mean[i], p.variance[i],
                                              spec.incumbent, spec.maximize);
      return values;
    }
  }
  throw ConfigError("unhandled acquisition kind");
}

double eval_acquisition(const AcquisitionSpec& spec, const SurrogateModels& models,
                        const Eigen::RowVectorXd& x) {
  return eval_acquisition_batch(spec, models, x)[0];
}

MaximizerResult maximize_acquisition(const AcquisitionSpec& spec,
                                     const SurrogateModels& models,
                                     const BoxBounds& bounds, int budget,
                                     std::uint64_t seed) {
  bounds.validate();
  if (budget < 1) throw std::invalid_argument("acquisition budget must be >= 1");

  const int n_candidates = budget * 50;
  const Eigen::MatrixXd cand =
      lowdisc_points(n_candidates, bounds, sub_seed(seed, 0xacc0ULL));
  const Eigen::VectorXd values = eval_acquisition_batch(spec, models, cand);

  // Rank candidates by value, ties to the lowest index so the result is
  // independent of any future evaluation-order parallelism.
  std::vector<int> order(n_candidates);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] > values[b]; });

  Eigen::VectorXd best_x = cand.row(order[0]);
  double best_v = values[order[0]];

  const auto objective = [&](const Eigen::VectorXd& v) {
    return -eval_acquisition(spec, models, bounds.clip(v).transpose());
  };
  const double step =
      1e-2 * (bounds.upper - bounds.lower).minCoeff();
  const int n_starts = std::min(5, n_candidates);
  for (int s = 0; s < n_starts; ++s) {
    const NelderMeadResult r = nelder_mead_minimize(
        objective, cand.row(order[s]).transpose(), step, 60 * bounds.dim());
    const Eigen::VectorXd xr = bounds.clip(r.x);
    const double vr = -objective(xr);
    if (vr > best_v) {
      best_v = vr;
      best_x = xr;
    }
  }
  return {best_x, best_v};
}

}  // namespace dualgp
