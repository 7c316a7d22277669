#include "dualgp/config.hpp"

#include <fstream>
#include <set>

#include "dualgp/errors.hpp"

namespace dualgp {

KernelParams ModelConfig::kernel_params(int dim) const {
  KernelParams p;
  p.variance = variance;
  p.lengthscales = lengthscales.size() > 0
                       ? lengthscales
                       : Eigen::VectorXd::Ones(dim);
  if (p.lengthscales.size() != dim)
    throw ConfigError("config has " + std::to_string(lengthscales.size()) +
                      " lengthscales but the problem dimension is " +
                      std::to_string(dim));
  p.validate(dim);
  return p;
}

Likelihood ModelConfig::make_likelihood() const {
  return likelihood == LikelihoodKind::Gaussian
             ? Likelihood::gaussian(noise_variance)
             : Likelihood::bernoulli_probit();
}

namespace {

void check_keys(const nlohmann::json& j, const std::string& where,
                const std::set<std::string>& known) {
  if (!j.is_object())
    throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (known.find(item.key()) == known.end())
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ConfigError(what + " must be positive");
}

ModelConfig parse_model(const nlohmann::json& j) {
  check_keys(j, "model",
             {"kernel", "variance", "lengthscales", "likelihood",
              "noise_variance", "m", "jitter"});
  ModelConfig m;
  m.kernel = kernel_kind_from_string(get_or<std::string>(j, "kernel", "matern52"));
  m.variance = get_or<double>(j, "variance", m.variance);
  require_positive(m.variance, "model.variance");
  if (j.contains("lengthscales")) {
    const auto ls = j.at("lengthscales");
    if (!ls.is_array() || ls.empty())
      throw ConfigError("model.lengthscales must be a nonempty array");
    m.lengthscales.resize(static_cast<Eigen::Index>(ls.size()));
    for (size_t i = 0; i < ls.size(); ++i) {
      if (!ls.at(i).is_number())
        throw ConfigError("key 'lengthscales' has the wrong type");
      m.lengthscales[static_cast<Eigen::Index>(i)] = ls.at(i).get<double>();
      require_positive(m.lengthscales[static_cast<Eigen::Index>(i)],
                       "model.lengthscales[" + std::to_string(i) + "]");
    }
  }
  m.likelihood =
      likelihood_kind_from_string(get_or<std::string>(j, "likelihood", "gaussian"));
  m.noise_variance = get_or<double>(j, "noise_variance", m.noise_variance);
  require_positive(m.noise_variance, "model.noise_variance");
  m.m = get_or<int>(j, "m", m.m);
  if (m.m < 1) throw ConfigError("model.m must be >= 1");
  m.jitter = get_or<double>(j, "jitter", m.jitter);
  if (m.jitter < 0.0) throw ConfigError("model.jitter must be >= 0");
  return m;
}

FitOptions parse_fit(const nlohmann::json& j) {
  check_keys(j, "fit", {"max_iters", "rho", "tol"});
  FitOptions f;
  f.max_iters = get_or<int>(j, "max_iters", f.max_iters);
  if (f.max_iters < 0) throw ConfigError("fit.max_iters must be >= 0");
  f.rho = get_or<double>(j, "rho", f.rho);
  if (!(f.rho > 0.0) || f.rho > 1.0)
    throw ConfigError("fit.rho must lie in (0, 1]");
  f.tol = get_or<double>(j, "tol", f.tol);
  require_positive(f.tol, "fit.tol");
  return f;
}

AcquisitionConfig parse_acquisition(const nlohmann::json& j) {
  check_keys(j, "acquisition", {"kind", "budget", "maximize"});
  AcquisitionConfig a;
  a.kind = acquisition_kind_from_string(get_or<std::string>(j, "kind", "ei"));
  a.budget = get_or<int>(j, "budget", a.budget);
  if (a.budget < 1) throw ConfigError("acquisition.budget must be >= 1");
  a.maximize = get_or<bool>(j, "maximize", a.maximize);
  return a;
}

BOConfig parse_bo(const nlohmann::json& j) {
  check_keys(j, "bo", {"batch_size", "iterations", "init_size", "hyper_max_evals"});
  BOConfig b;
  b.batch_size = get_or<int>(j, "batch_size", b.batch_size);
  if (b.batch_size < 1) throw ConfigError("bo.batch_size must be >= 1");
  b.iterations = get_or<int>(j, "iterations", b.iterations);
  if (b.iterations < 0) throw ConfigError("bo.iterations must be >= 0");
  b.init_size = get_or<int>(j, "init_size", b.init_size);
  if (b.init_size < 0) throw ConfigError("bo.init_size must be >= 0");
  b.hyper_max_evals = get_or<int>(j, "hyper_max_evals", b.hyper_max_evals);
  if (b.hyper_max_evals < 0) throw ConfigError("bo.hyper_max_evals must be >= 0");
  return b;
}

ProblemConfig parse_problem(const nlohmann::json& j) {
  check_keys(j, "problem",
             {"kind", "n_per_batch", "n_batches", "noise_sd", "flip_prob",
              "path", "stream_batch_size"});
  ProblemConfig p;
  p.kind = get_or<std::string>(j, "kind", p.kind);
  if (p.kind != "banana" && p.kind != "noisy-branin-disk" && p.kind != "csv")
    throw ConfigError("unknown problem.kind '" + p.kind + "'");
  p.n_per_batch = get_or<int>(j, "n_per_batch", p.n_per_batch);
  if (p.n_per_batch < 10) throw ConfigError("problem.n_per_batch must be >= 10");
  p.n_batches = get_or<int>(j, "n_batches", p.n_batches);
  if (p.n_batches < 1) throw ConfigError("problem.n_batches must be >= 1");
  p.noise_sd = get_or<double>(j, "noise_sd", p.noise_sd);
  if (p.noise_sd < 0.0) throw ConfigError("problem.noise_sd must be >= 0");
  p.flip_prob = get_or<double>(j, "flip_prob", p.flip_prob);
  if (p.flip_prob < 0.0 || p.flip_prob > 1.0)
    throw ConfigError("problem.flip_prob must lie in [0, 1]");
  p.path = get_or<std::string>(j, "path", p.path);
  p.stream_batch_size = get_or<int>(j, "stream_batch_size", p.stream_batch_size);
  if (p.stream_batch_size < 1)
    throw ConfigError("problem.stream_batch_size must be >= 1");
  if (p.kind == "csv" && p.path.empty())
    throw ConfigError("problem.kind \"csv\" requires problem.path");
  return p;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  check_keys(j, "config",
             {"model", "fit", "acquisition", "bo", "problem", "seed", "output_dir"});
  ExperimentConfig c;
  if (j.contains("model")) c.model = parse_model(j.at("model"));
  if (j.contains("fit")) c.fit = parse_fit(j.at("fit"));
  if (j.contains("acquisition")) c.acquisition = parse_acquisition(j.at("acquisition"));
  if (j.contains("bo")) c.bo = parse_bo(j.at("bo"));
  if (j.contains("problem")) c.problem = parse_problem(j.at("problem"));
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace dualgp
