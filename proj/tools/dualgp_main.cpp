#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include <random>

#include "dualgp/bo_driver.hpp"
#include "dualgp/errors.hpp"
#include "dualgp/lowdisc.hpp"
#include "dualgp/optim.hpp"
#include "dualgp/rng.hpp"
#include "dualgp/serialize.hpp"

namespace {

using dualgp::ConfigError;
using dualgp::Dataset;
using dualgp::ExperimentConfig;
using nlohmann::json;

std::filesystem::path ensure_output_dir(const ExperimentConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::invalid_argument("write to '" + path.string() + "' failed");
}

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json ivector_to_json(const Eigen::VectorXi& v) {
  return std::vector<int>(v.data(), v.data() + v.size());
}

// Datasets for fit/stream come from the problem block; BO problems have no
// dataset to fit offline, so reject them here.
Dataset dataset_from_config(const ExperimentConfig& config) {
  if (config.problem.kind == "banana")
    return dualgp::generate_banana(config.problem.n_per_batch,
                                   config.problem.n_batches, config.seed)
        .concat();
  if (config.problem.kind == "csv") return dualgp::load_csv(config.problem.path);
  throw ConfigError("problem.kind '" + config.problem.kind +
                    "' does not provide a dataset; use \"banana\" or \"csv\"");
}

dualgp::StreamBatches stream_from_config(const ExperimentConfig& config) {
  if (config.problem.kind == "banana")
    return dualgp::generate_banana(config.problem.n_per_batch,
                                   config.problem.n_batches, config.seed);
  if (config.problem.kind == "csv")
    return dualgp::partition_stream(dualgp::load_csv(config.problem.path),
                                    config.problem.stream_batch_size);
  throw ConfigError("problem.kind '" + config.problem.kind +
                    "' is not a stream; use \"banana\" or \"csv\"");
}

int cmd_fit(const ExperimentConfig& config) {
  const auto dir = ensure_output_dir(config);
  const Dataset data = dataset_from_config(config);
  if (data.n() == 0) throw ConfigError("dataset is empty");

  const int m_eff = std::min<int>(config.model.m, static_cast<int>(data.n()));
  const Eigen::MatrixXd Z = dualgp::kmeans_centroids(
      data.X, m_eff, 25, dualgp::sub_seed(config.seed, 0xf17ULL));
  dualgp::DualState state = dualgp::make_state(
      config.model.kernel, config.model.kernel_params(data.dim()),
      config.model.make_likelihood(), dualgp::InducingSet(Z), config.model.jitter);

  dualgp::FitOptions options = config.fit;
  options.record_elbo = true;
  const dualgp::FitResult result = dualgp::fit(state, data, options);

  dualgp::save_state(result.state, (dir / "model.json").string());
  std::string trace = "iter,elbo\n";
  char buf[64];
  for (size_t i = 0; i < result.elbo_trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, result.elbo_trace[i]);
    trace += buf;
  }
  write_text(dir / "elbo_trace.csv", trace);

  std::cerr << "fit: " << result.iterations << " iteration(s), converged="
            << (result.converged ? "yes" : "no") << ", final ELBO "
            << (result.elbo_trace.empty() ? 0.0 : result.elbo_trace.back())
            << "\n";
  return 0;
}

int cmd_stream(const ExperimentConfig& config) {
  const auto dir = ensure_output_dir(config);
  const dualgp::Problem problem =
      dualgp::make_stream_problem(stream_from_config(config), config.problem.kind);
  const dualgp::StreamResult result =
      dualgp::run_streaming(problem, config, config.seed);

  for (size_t b = 0; b < result.states.size(); ++b)
    dualgp::save_state(result.states[b],
                       (dir / ("model_batch_" + std::to_string(b + 1) + ".json")).string());
  if (result.grids.size() > 0) {
    for (size_t b = 0; b < result.grids.size(); ++b)
      write_text(dir / ("grid_batch_" + std::to_string(b + 1) + ".json"),
                 dualgp::grid_to_json(result.grid_xs, result.grid_ys,
                                      result.grids[b])
                     .dump(2));
    write_text(dir / "grid_offline.json",
               dualgp::grid_to_json(result.grid_xs, result.grid_ys,
                                    result.offline_grid)
                   .dump(2));
  }

  const json summary{
      {"n_batches", result.states.size()},
      {"mean_abs_gap", result.grid_gap},
      {"train_accuracy_streamed", result.train_accuracy_streamed},
      {"train_accuracy_offline", result.train_accuracy_offline},
      {"accuracy_gap", std::abs(result.train_accuracy_streamed -
                                result.train_accuracy_offline)},
      {"batch1_fit_converged", result.fit_converged.at(0)},
      {"offline_fit_converged", result.fit_converged.at(1)},
  };
  write_text(dir / "stream_summary.json", summary.dump(2) + "\n");
  std::cerr << "stream: " << result.states.size() << " batch(es), mean-abs gap "
            << result.grid_gap << "\n";
  return 0;
}

int cmd_bo(const ExperimentConfig& config) {
  const auto dir = ensure_output_dir(config);
  if (config.problem.kind != "noisy-branin-disk")
    throw ConfigError("bo requires problem.kind \"noisy-branin-disk\"");
  dualgp::Problem problem =
      dualgp::generate_constrained_problem(config.problem.kind, config.seed);
  problem.noise_sd = config.problem.noise_sd;
  problem.flip_prob = config.problem.flip_prob;

  const dualgp::BOHistory history = dualgp::run_bo(problem, config, config.seed);

  json jiters = json::array();
  for (const auto& rec : history.iterations) {
    json ji{
        {"points", dualgp::matrix_to_json(rec.batch.points)},
        {"fantasized_values", vector_to_json(rec.batch.fantasized_values)},
        {"fantasized_labels", vector_to_json(rec.batch.fantasized_labels)},
        {"acq_values", vector_to_json(rec.batch.acq_values)},
        {"duplicate_warning", rec.batch.duplicate_warning},
        {"observed_y", vector_to_json(rec.observed_y)},
        {"observed_success", ivector_to_json(rec.observed_success)},
        {"incumbent", rec.incumbent},
        {"elbo_reg", rec.elbo_reg},
        {"elbo_clf", rec.elbo_clf},
        {"wall_ms", rec.wall_ms},
        {"error", rec.error},
        {"error_message", rec.error_message},
    };
    jiters.push_back(std::move(ji));
  }
  const json jhist{
      {"problem", problem.name},
      {"best_feasible_x", vector_to_json(problem.best_feasible_x.transpose())},
      {"best_feasible_value", problem.best_feasible_value},
      {"init",
       {{"X", dualgp::matrix_to_json(history.init_X)},
        {"y", vector_to_json(history.init_y)},
        {"success", ivector_to_json(history.init_success)},
        {"incumbent", history.init_incumbent}}},
      {"iterations", jiters},
      {"error", history.error},
      {"error_message", history.error_message},
  };
  write_text(dir / "history.json", jhist.dump(2) + "\n");

  std::string csv = "iter,incumbent,batch_best,wall_ms\n";
  char buf[128];
  for (size_t i = 0; i < history.iterations.size(); ++i) {
    const auto& rec = history.iterations[i];
    const double batch_best =
        rec.observed_y.size() > 0 ? rec.observed_y.maxCoeff() : 0.0;
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.3f\n", i + 1,
                  rec.incumbent, batch_best, rec.wall_ms);
    csv += buf;
  }
  write_text(dir / "history.csv", csv);

  std::cerr << "bo: " << history.iterations.size() << " iteration(s), incumbent "
            << (history.iterations.empty() ? history.init_incumbent
                                           : history.iterations.back().incumbent)
            << (history.error ? " (aborted: " + history.error_message + ")" : "")
            << "\n";
  return history.error ? 3 : 0;
}

int cmd_bench_conditioning(const ExperimentConfig& config) {
  const auto dir = ensure_output_dir(config);
  constexpr int kM = 50;
  constexpr int kReps = 5;
  const std::vector<int> sizes{1000, 2000, 4000};

  auto rng = dualgp::make_rng(dualgp::sub_seed(config.seed, 0xbe2cULL));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int n_max = sizes.back();
  Eigen::MatrixXd X(n_max, 2);
  Eigen::VectorXd y_real(n_max), y_bin(n_max);
  for (int i = 0; i < n_max; ++i) {
    X(i, 0) = unif(rng);
    X(i, 1) = unif(rng);
    y_real[i] = gauss(rng);
    y_bin[i] = unif(rng) < 0.5 ? 0.0 : 1.0;
  }
  const Eigen::MatrixXd Z = dualgp::lowdisc_points(
      kM,
      dualgp::make_bounds(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)),
      dualgp::sub_seed(config.seed, 0xbe2dULL));
  const dualgp::KernelParams params = dualgp::KernelParams::isotropic(1.0, 0.5, 2);

  std::string csv = "likelihood,n_new,median_ms\n";
  json summary;
  for (const auto& [tag, lik, y] :
       {std::tuple{std::string("gaussian"), dualgp::Likelihood::gaussian(0.1), &y_real},
        std::tuple{std::string("bernoulli"), dualgp::Likelihood::bernoulli_probit(), &y_bin}}) {
    const dualgp::DualState base =
        dualgp::make_state(dualgp::KernelKind::Matern52, params, lik,
                           dualgp::InducingSet(Z));
    const dualgp::OutputDomain domain = tag == "gaussian"
                                            ? dualgp::OutputDomain::Real
                                            : dualgp::OutputDomain::Binary;
    std::vector<double> medians;
    for (int n : sizes) {
      const Dataset batch = dualgp::make_dataset(X.topRows(n), y->head(n), domain);
      std::vector<double> times;
      for (int rep = 0; rep < kReps; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const dualgp::DualState conditioned = dualgp::dual_condition(base, batch);
        const auto t1 = std::chrono::steady_clock::now();
        (void)conditioned;
        times.push_back(
            std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      std::sort(times.begin(), times.end());
      const double median = times[times.size() / 2];
      medians.push_back(median);
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%s,%d,%.4f\n", tag.c_str(), n, median);
      csv += buf;
    }
    // Least-squares line through (n, median) pairs; the slope carries the
    // O(n_new) term, the intercept the fixed m^3 work.
    const double n_mean = (1000.0 + 2000.0 + 4000.0) / 3.0;
    const double t_mean = (medians[0] + medians[1] + medians[2]) / 3.0;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < sizes.size(); ++i) {
      sxx += (sizes[i] - n_mean) * (sizes[i] - n_mean);
      sxy += (sizes[i] - n_mean) * (medians[i] - t_mean);
    }
    summary[tag] = {
        {"median_ms", {{"1000", medians[0]}, {"2000", medians[1]}, {"4000", medians[2]}}},
        {"ratio_4000_1000", medians[2] / medians[0]},
        {"slope_ms_per_point", sxy / sxx},
        {"intercept_ms", t_mean - (sxy / sxx) * n_mean},
    };
  }
  write_text(dir / "bench_conditioning.csv", csv);
  write_text(dir / "bench_summary.json", summary.dump(2) + "\n");
  std::cerr << "bench: gaussian ratio "
            << summary["gaussian"]["ratio_4000_1000"].get<double>()
            << ", bernoulli ratio "
            << summary["bernoulli"]["ratio_4000_1000"].get<double>() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dualgp: sparse variational GPs in the dual parameterization, with "
      "one-step conditioning and batch fantasizing"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  int batch_size_override = 0;

  const auto add_common = [&](CLI::App* sub, bool config_required) {
    // Existence is checked by load_config, not CLI11, so a missing file
    // reports through the config exit code like every other config problem.
    auto* copt = sub->add_option("--config", config_path,
                                 "experiment config JSON file");
    if (config_required) copt->required();
    sub->add_option("--seed", seed_override, "override config seed")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--out", out_override, "override output directory")
        ->envname("DUALGP_OUTPUT_DIR");
  };

  auto* fit = app.add_subcommand("fit", "fit a model on a dataset, write model + ELBO trace");
  add_common(fit, true);
  auto* stream = app.add_subcommand("stream", "streaming conditioning run with offline oracle");
  add_common(stream, true);
  auto* bo = app.add_subcommand("bo", "batch Bayesian-optimization run");
  add_common(bo, true);
  bo->add_option("--batch-size", batch_size_override,
                 "override bo.batch_size (1 = non-batch baseline)")
      ->check(CLI::PositiveNumber);
  auto* bench = app.add_subcommand(
      "bench-conditioning", "time one-step conditioning across batch sizes");
  add_common(bench, false);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config;
    if (!config_path.empty()) config = dualgp::load_config(config_path);
    if (seed_given) config.seed = seed_override;
    if (!out_override.empty()) config.output_dir = out_override;
    if (batch_size_override > 0) config.bo.batch_size = batch_size_override;

    if (fit->parsed()) return cmd_fit(config);
    if (stream->parsed()) return cmd_stream(config);
    if (bo->parsed()) return cmd_bo(config);
    if (bench->parsed()) return cmd_bench_conditioning(config);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "filesystem error: " << e.what() << "\n";
    return 2;
  } catch (const dualgp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
