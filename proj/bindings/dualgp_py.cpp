#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dualgp/bo_driver.hpp"
#include "dualgp/errors.hpp"
#include "dualgp/serialize.hpp"

namespace py = pybind11;
using namespace dualgp;

namespace {

Dataset dataset_from_py(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const std::string& domain) {
  return make_dataset(X, y, domain_from_string(domain));
}

DualState make_state_py(const std::string& kernel, double variance,
                        const Eigen::VectorXd& lengthscales,
                        const std::string& likelihood, double noise_variance,
                        const Eigen::MatrixXd& Z, double jitter) {
  KernelParams params;
  params.variance = variance;
  params.lengthscales = lengthscales;
  const Likelihood lik = likelihood == "bernoulli"
                             ? Likelihood::bernoulli_probit()
                             : Likelihood::gaussian(noise_variance);
  if (likelihood != "bernoulli" && likelihood != "gaussian")
    throw ConfigError("unknown likelihood '" + likelihood + "'");
  return make_state(kernel_kind_from_string(kernel), params, lik, InducingSet(Z),
                    jitter);
}

AcquisitionSpec spec_from_py(const std::string& kind, double incumbent,
                             bool maximize) {
  AcquisitionSpec spec;
  spec.kind = acquisition_kind_from_string(kind);
  spec.incumbent = incumbent;
  spec.maximize = maximize;
  return spec;
}

SurrogateModels models_from_py(DualState* regression, DualState* classification) {
  SurrogateModels models;
  models.regression = regression;
  models.classification = classification;
  return models;
}

}  // namespace

PYBIND11_MODULE(_dualgp, mod) {
  mod.doc() = "sparse variational GPs in the dual parameterization";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);

  py::class_<DualState>(mod, "DualState")
      .def_property_readonly("lambda_", [](const DualState& s) { return s.lambda; })
      .def_property_readonly("Lambda", [](const DualState& s) { return s.Lambda; })
      .def_property_readonly("Z", [](const DualState& s) { return s.inducing.Z; })
      .def_property_readonly("m", [](const DualState& s) { return s.inducing.m(); })
      .def("clone", &clone_state);

  mod.def("make_state", &make_state_py, py::arg("kernel"), py::arg("variance"),
          py::arg("lengthscales"), py::arg("likelihood"),
          py::arg("noise_variance"), py::arg("Z"),
          py::arg("jitter") = kDefaultJitterRel);

  mod.def(
      "fit",
      [](const DualState& state, const Eigen::MatrixXd& X,
         const Eigen::VectorXd& y, const std::string& domain, int max_iters,
         double rho, double tol) {
        FitOptions options;
        options.max_iters = max_iters;
        options.rho = rho;
        options.tol = tol;
        options.record_elbo = true;
        FitResult r = fit(state, dataset_from_py(X, y, domain), options);
        return py::make_tuple(r.state, r.converged, r.iterations, r.elbo_trace);
      },
      py::arg("state"), py::arg("X"), py::arg("y"), py::arg("domain"),
      py::arg("max_iters") = 100, py::arg("rho") = 0.5, py::arg("tol") = 1e-6);

  mod.def(
      "natgrad_step",
      [](const DualState& state, const Eigen::MatrixXd& X,
         const Eigen::VectorXd& y, const std::string& domain, double rho) {
        return natgrad_step(state, dataset_from_py(X, y, domain), rho);
      },
      py::arg("state"), py::arg("X"), py::arg("y"), py::arg("domain"),
      py::arg("rho"));

  mod.def(
      "dual_condition",
      [](const DualState& state, const Eigen::MatrixXd& X,
         const Eigen::VectorXd& y, const std::string& domain) {
        return dual_condition(state, dataset_from_py(X, y, domain));
      },
      py::arg("state"), py::arg("X"), py::arg("y"), py::arg("domain"));

  mod.def(
      "predict",
      [](const DualState& state, const Eigen::MatrixXd& X) {
        Prediction p = predict(state, X);
        return py::make_tuple(p.mean, p.variance);
      },
      py::arg("state"), py::arg("X"));

  mod.def(
      "predict_full_cov",
      [](const DualState& state, const Eigen::MatrixXd& X) {
        Prediction p = predict(state, X, true);
        return py::make_tuple(p.mean, *p.cov);
      },
      py::arg("state"), py::arg("X"));

  mod.def("predict_y", &predict_y, py::arg("state"), py::arg("X"));

  mod.def(
      "elbo",
      [](const DualState& state, const Eigen::MatrixXd& X,
         const Eigen::VectorXd& y, const std::string& domain) {
        return elbo(state, dataset_from_py(X, y, domain));
      },
      py::arg("state"), py::arg("X"), py::arg("y"), py::arg("domain"));

  mod.def(
      "to_moments",
      [](const DualState& state) {
        MomentState m = to_moments(state);
        return py::make_tuple(m.m_star, m.V_star);
      },
      py::arg("state"));

  mod.def(
      "state_to_json", [](const DualState& s) { return state_to_json(s).dump(); },
      py::arg("state"));
  mod.def(
      "state_from_json",
      [](const std::string& text) {
        return state_from_json(nlohmann::json::parse(text));
      },
      py::arg("text"));

  mod.def(
      "expected_improvement",
      [](const DualState& state, const Eigen::MatrixXd& X, double incumbent,
         bool maximize) {
        Eigen::VectorXd out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
          out[i] = expected_improvement(state, X.row(i), incumbent, maximize);
        return out;
      },
      py::arg("state"), py::arg("X"), py::arg("incumbent"),
      py::arg("maximize") = true);

  mod.def(
      "success_probability",
      [](const DualState& state, const Eigen::MatrixXd& X) {
        Eigen::VectorXd out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
          out[i] = success_probability(state, X.row(i));
        return out;
      },
      py::arg("state"), py::arg("X"));

  mod.def(
      "maximize_acquisition",
      [](const std::string& kind, DualState* regression,
         DualState* classification, double incumbent, bool maximize,
         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int budget,
         std::uint64_t seed) {
        MaximizerResult r = maximize_acquisition(
            spec_from_py(kind, incumbent, maximize),
            models_from_py(regression, classification), make_bounds(lower, upper),
            budget, seed);
        return py::make_tuple(r.x, r.value);
      },
      py::arg("kind"), py::arg("regression").none(true),
      py::arg("classification").none(true), py::arg("incumbent"),
      py::arg("maximize"), py::arg("lower"), py::arg("upper"), py::arg("budget"),
      py::arg("seed"));

  mod.def(
      "fantasize_batch",
      [](const std::string& kind, DualState* regression,
         DualState* classification, double incumbent, bool maximize,
         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int k,
         int budget, std::uint64_t seed) {
        FantasyBatch b = fantasize_batch(
            models_from_py(regression, classification),
            spec_from_py(kind, incumbent, maximize), make_bounds(lower, upper), k,
            budget, seed);
        py::dict out;
        out["points"] = b.points;
        out["fantasized_values"] = b.fantasized_values;
        out["fantasized_labels"] = b.fantasized_labels;
        out["acq_values"] = b.acq_values;
        out["duplicate_warning"] = b.duplicate_warning;
        return out;
      },
      py::arg("kind"), py::arg("regression").none(true),
      py::arg("classification").none(true), py::arg("incumbent"),
      py::arg("maximize"), py::arg("lower"), py::arg("upper"), py::arg("k"),
      py::arg("budget"), py::arg("seed"));

  mod.def(
      "generate_banana",
      [](int n_per_batch, int n_batches, std::uint64_t seed) {
        StreamBatches s = generate_banana(n_per_batch, n_batches, seed);
        py::list out;
        for (const auto& b : s.batches) out.append(py::make_tuple(b.X, b.y));
        return out;
      },
      py::arg("n_per_batch"), py::arg("n_batches"), py::arg("seed"));

  mod.def(
      "partition_stream",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
         const std::string& domain, int batch_size) {
        StreamBatches s =
            partition_stream(dataset_from_py(X, y, domain), batch_size);
        py::list out;
        for (const auto& b : s.batches) out.append(py::make_tuple(b.X, b.y));
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("domain"), py::arg("batch_size"));

  mod.def(
      "save_csv",
      [](const std::string& path, const Eigen::MatrixXd& X,
         const Eigen::VectorXd& y, const std::string& domain) {
        save_csv(dataset_from_py(X, y, domain), path);
      },
      py::arg("path"), py::arg("X"), py::arg("y"), py::arg("domain"));
  mod.def(
      "load_csv",
      [](const std::string& path) {
        Dataset d = load_csv(path);
        return py::make_tuple(
            d.X, d.y, d.domain == OutputDomain::Binary ? "binary" : "real");
      },
      py::arg("path"));

  mod.def(
      "run_streaming_summary",
      [](const std::string& config_text, std::uint64_t seed) {
        const ExperimentConfig config =
            parse_config(nlohmann::json::parse(config_text));
        const Problem problem = make_stream_problem(
            config.problem.kind == "banana"
                ? generate_banana(config.problem.n_per_batch,
                                  config.problem.n_batches, config.seed)
                : partition_stream(load_csv(config.problem.path),
                                   config.problem.stream_batch_size),
            config.problem.kind);
        StreamResult r = run_streaming(problem, config, seed);
        py::dict out;
        out["n_batches"] = r.states.size();
        out["mean_abs_gap"] = r.grid_gap;
        out["train_accuracy_streamed"] = r.train_accuracy_streamed;
        out["train_accuracy_offline"] = r.train_accuracy_offline;
        return out;
      },
      py::arg("config_text"), py::arg("seed"));
}
