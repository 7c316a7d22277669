#include "dualgp/bo_driver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dualgp/errors.hpp"
#include "dualgp/lowdisc.hpp"
#include "dualgp/optim.hpp"
#include "dualgp/rng.hpp"

namespace dualgp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kLloydIterations = 25;

DualState refit_from_scratch(const DualState& like, const Dataset& data,
                             const FitOptions& fit_options) {
  DualState fresh = make_state(like.kind, like.params, like.lik, like.inducing,
                               like.jitter_rel);
  return fit(fresh, data, fit_options).state;
}

// Log-domain hyperparameter vector: [log variance, log lengthscales...,
// log noise_variance (Gaussian only)].
Eigen::VectorXd pack_theta(const DualState& s) {
  const int d = s.dim();
  const bool gaussian = s.lik.kind == LikelihoodKind::Gaussian;
  Eigen::VectorXd t(1 + d + (gaussian ? 1 : 0));
  t[0] = std::log(s.params.variance);
  for (int i = 0; i < d; ++i) t[1 + i] = std::log(s.params.lengthscales[i]);
  if (gaussian) t[1 + d] = std::log(s.lik.noise_variance);
  return t;
}

DualState state_at_theta(const DualState& like, const Eigen::VectorXd& t) {
  const int d = like.dim();
  KernelParams params;
  params.variance = std::exp(t[0]);
  params.lengthscales.resize(d);
  for (int i = 0; i < d; ++i) params.lengthscales[i] = std::exp(t[1 + i]);
  const Likelihood lik = like.lik.kind == LikelihoodKind::Gaussian
                             ? Likelihood::gaussian(std::exp(t[1 + d]))
                             : Likelihood::bernoulli_probit();
  return make_state(like.kind, params, lik, like.inducing, like.jitter_rel);
}

double incumbent_floor(const Eigen::VectorXd& y) { return y.minCoeff() - 1.0; }

// Best observed feasible objective; the floor keeps EI referenced below all
// observations until the first feasible point shows up.
double best_feasible(const Eigen::VectorXd& y, const Eigen::VectorXi& success,
                     bool constrained, double floor) {
  double best = floor;
  bool any = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (constrained && success[i] != 1) continue;
    best = any ? std::max(best, y[i]) : y[i];
    any = true;
  }
  return any ? best : floor;
}

}  // namespace

DualState update_hyperparameters(const DualState& state, const Dataset& data,
                                 const FitOptions& fit_options, int max_evals) {
  if (max_evals < 0) throw std::invalid_argument("max_evals must be >= 0");
  DualState fitted = refit_from_scratch(state, data, fit_options);
  if (max_evals == 0) return fitted;

  const double elbo_in = elbo(fitted, data);
  const auto objective = [&](const Eigen::VectorXd& t) -> double {
    // Over-flat or over-sharp proposals can push the kernel matrix past the
    // jitter ladder; treat that as an infinitely bad candidate, not an error.
    if (t.cwiseAbs().maxCoeff() > 15.0) return std::numeric_limits<double>::infinity();
    try {
      const DualState cand = state_at_theta(state, t);
      return -elbo(fit(cand, data, fit_options).state, data);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const NelderMeadResult r =
      nelder_mead_minimize(objective, pack_theta(fitted), 0.3, max_evals);
  if (-r.value <= elbo_in) return fitted;  // guarded acceptance
  return fit(state_at_theta(state, r.x), data, fit_options).state;
}

DualState update_inducing(const DualState& state, const Dataset& data, int m,
                          const FitOptions& fit_options, std::uint64_t seed,
                          bool* m_clamped) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  data.validate();
  if (data.n() == 0) throw std::invalid_argument("dataset is empty");
  const int m_eff = std::min<int>(m, static_cast<int>(data.n()));
  if (m_clamped != nullptr) *m_clamped = m_eff != m;

  const Eigen::MatrixXd Z =
      kmeans_centroids(data.X, m_eff, kLloydIterations, seed);
  DualState fresh = make_state(state.kind, state.params, state.lik,
                               InducingSet(Z), state.jitter_rel);
  return fit(fresh, data, fit_options).state;
}

BOHistory run_bo(const Problem& problem, const ExperimentConfig& config,
                 std::uint64_t seed) {
  if (problem.kind != ProblemKind::SyntheticStochastic)
    throw ConfigError("run_bo needs a problem with an objective");
  if (config.model.likelihood != LikelihoodKind::Gaussian)
    throw ConfigError("the BO regression surrogate must use a Gaussian likelihood");
  const int d = problem.dim();
  const int init_size =
      config.bo.init_size > 0 ? config.bo.init_size : 3 * d;
  if (init_size < 2) throw ConfigError("initial design must have at least 2 points");

  const bool constrained = problem.has_feasibility();

  BOHistory history;
  history.init_X = lowdisc_points(init_size, problem.bounds,
                                  sub_seed(seed, 0x1a17ULL));
  history.init_y.resize(init_size);
  if (constrained) history.init_success.resize(init_size);
  for (int i = 0; i < init_size; ++i) {
    const std::uint64_t eval_seed = sub_seed(seed, 0, i);
    history.init_y[i] = problem.evaluate(history.init_X.row(i), eval_seed);
    if (constrained)
      history.init_success[i] =
          problem.evaluate_success(history.init_X.row(i), eval_seed);
  }

  Dataset reg_data = make_dataset(history.init_X, history.init_y, OutputDomain::Real);
  Dataset clf_data;
  if (constrained)
    clf_data = make_dataset(history.init_X, history.init_success.cast<double>(),
                            OutputDomain::Binary);

  const double floor = incumbent_floor(history.init_y);
  double incumbent = best_feasible(history.init_y, history.init_success,
                                   constrained, floor);
  history.init_incumbent = incumbent;

  // Surrogate refresh shared by the init block and every iteration:
  // k-means Z, ELBO-tuned theta, dual parameters refit on all data.
  KernelParams kp = config.model.kernel_params(d);
  DualState reg = make_state(config.model.kernel, kp,
                             Likelihood::gaussian(config.model.noise_variance),
                             InducingSet(history.init_X.topRows(1)),
                             config.model.jitter);
  DualState clf;
  if (constrained)
    clf = make_state(config.model.kernel, kp, Likelihood::bernoulli_probit(),
                     InducingSet(history.init_X.topRows(1)), config.model.jitter);

  const auto refresh = [&](std::uint64_t iter_tag) {
    reg = update_inducing(reg, reg_data, config.model.m, config.fit,
                          sub_seed(seed, iter_tag, 0x21ULL));
    reg = update_hyperparameters(reg, reg_data, config.fit,
                                 config.bo.hyper_max_evals);
    if (constrained) {
      clf = update_inducing(clf, clf_data, config.model.m, config.fit,
                            sub_seed(seed, iter_tag, 0x22ULL));
      clf = update_hyperparameters(clf, clf_data, config.fit,
                                   config.bo.hyper_max_evals);
    }
  };
  refresh(0x5e7ULL);

  for (int it = 1; it <= config.bo.iterations; ++it) {
    const auto started = std::chrono::steady_clock::now();
    BOIterationRecord rec;
    try {
      AcquisitionSpec spec;
      spec.kind = config.acquisition.kind;
      spec.incumbent = incumbent;
      spec.maximize = config.acquisition.maximize;
      SurrogateModels models;
      models.regression = &reg;
      if (constrained) models.classification = &clf;

      rec.batch = fantasize_batch(models, spec, problem.bounds,
                                  config.bo.batch_size, config.acquisition.budget,
                                  sub_seed(seed, it, 0xfaULL));

      const int k = config.bo.batch_size;
      rec.observed_y.resize(k);
      if (constrained) rec.observed_success.resize(k);
      for (int i = 0; i < k; ++i) {
        const std::uint64_t eval_seed = sub_seed(seed, it, i);
        rec.observed_y[i] = problem.evaluate(rec.batch.points.row(i), eval_seed);
        if (constrained)
          rec.observed_success[i] =
              problem.evaluate_success(rec.batch.points.row(i), eval_seed);
      }

      reg_data = concat(reg_data, make_dataset(rec.batch.points, rec.observed_y,
                                               OutputDomain::Real));
      if (constrained)
        clf_data = concat(clf_data,
                          make_dataset(rec.batch.points,
                                       rec.observed_success.cast<double>(),
                                       OutputDomain::Binary));

      refresh(static_cast<std::uint64_t>(it));

      incumbent = std::max(incumbent,
                           best_feasible(rec.observed_y, rec.observed_success,
                                         constrained, floor));
      rec.incumbent = incumbent;
      rec.elbo_reg = elbo(reg, reg_data);
      rec.elbo_clf = constrained ? elbo(clf, clf_data) : kNaN;
    } catch (const std::exception& e) {
      rec.error = true;
      rec.error_message = e.what();
      rec.incumbent = incumbent;  // carry the last good value; stays monotone
      rec.elbo_reg = kNaN;
      rec.elbo_clf = kNaN;
      history.error = true;
      history.error_message = e.what();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
    history.iterations.push_back(std::move(rec));
    if (history.error) break;
  }
  return history;
}

StreamResult run_streaming(const Problem& problem,
                           const ExperimentConfig& config, std::uint64_t seed) {
  if (problem.kind != ProblemKind::StreamClassification)
    throw ConfigError("run_streaming needs a stream problem");
  const StreamBatches& stream = problem.stream;
  if (stream.batches.empty()) throw ConfigError("stream has no batches");
  stream.validate();

  const Dataset all = stream.concat();
  const Dataset& first = stream.batches.front();
  const int d = first.dim();

  const Likelihood lik = config.model.likelihood == LikelihoodKind::Gaussian
                             ? Likelihood::gaussian(config.model.noise_variance)
                             : Likelihood::bernoulli_probit();
  const int m_eff = std::min<int>(config.model.m, static_cast<int>(first.n()));
  const Eigen::MatrixXd Z = kmeans_centroids(
      first.X, m_eff, kLloydIterations, sub_seed(seed, 0x57ULL));

  DualState fresh = make_state(config.model.kernel,
                               config.model.kernel_params(d), lik,
                               InducingSet(Z), config.model.jitter);

  StreamResult result;

  const bool want_grids = d == 2;
  if (want_grids) {
    const Eigen::VectorXd lo = all.X.colwise().minCoeff();
    const Eigen::VectorXd hi = all.X.colwise().maxCoeff();
    result.grid_xs = Eigen::VectorXd::LinSpaced(50, lo[0], hi[0]);
    result.grid_ys = Eigen::VectorXd::LinSpaced(50, lo[1], hi[1]);
  }
  const auto surface = [&](const DualState& s) -> Eigen::MatrixXd {
    if (!want_grids) return {};
    Eigen::MatrixXd G(result.grid_ys.size(), result.grid_xs.size());
    Eigen::MatrixXd pts(G.size(), 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < G.rows(); ++i)
      for (Eigen::Index j = 0; j < G.cols(); ++j) {
        pts(k, 0) = result.grid_xs[j];
        pts(k, 1) = result.grid_ys[i];
        ++k;
      }
    const Eigen::VectorXd v = predict_y(s, pts);
    k = 0;
    for (Eigen::Index i = 0; i < G.rows(); ++i)
      for (Eigen::Index j = 0; j < G.cols(); ++j) G(i, j) = v[k++];
    return G;
  };

  // Batch 1: fit from scratch. Batches 2..B: one-step conditioning only.
  FitResult first_fit = fit(fresh, first, config.fit);
  result.fit_converged.push_back(first_fit.converged);
  DualState current = first_fit.state;
  result.states.push_back(current);
  if (want_grids) result.grids.push_back(surface(current));
  for (size_t b = 1; b < stream.batches.size(); ++b) {
    current = dual_condition(current, stream.batches[b]);
    result.states.push_back(current);
    if (want_grids) result.grids.push_back(surface(current));
  }

  FitResult offline_fit = fit(fresh, all, config.fit);
  result.fit_converged.push_back(offline_fit.converged);
  result.offline_state = offline_fit.state;
  if (want_grids) {
    result.offline_grid = surface(result.offline_state);
    result.grid_gap =
        (result.grids.back() - result.offline_grid).cwiseAbs().mean();
  } else {
    // Without a grid the gap is still well-defined on the training inputs.
    result.grid_gap = (predict_y(current, all.X) -
                       predict_y(result.offline_state, all.X))
                          .cwiseAbs()
                          .mean();
  }

  if (all.domain == OutputDomain::Binary) {
    const auto accuracy = [&](const DualState& s) {
      const Eigen::VectorXd p = predict_y(s, all.X);
      Eigen::Index hits = 0;
      for (Eigen::Index i = 0; i < all.n(); ++i)
        hits += ((p[i] >= 0.5) == (all.y[i] == 1.0)) ? 1 : 0;
      return static_cast<double>(hits) / static_cast<double>(all.n());
    };
    result.train_accuracy_streamed = accuracy(current);
    result.train_accuracy_offline = accuracy(result.offline_state);
  } else {
    result.train_accuracy_streamed = kNaN;
    result.train_accuracy_offline = kNaN;
  }
  return result;
}

}  // namespace dualgp
