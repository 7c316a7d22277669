#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "dualgp/bounds.hpp"
#include "dualgp/data_io.hpp"

namespace dualgp {

enum class ProblemKind { SyntheticStochastic, StreamClassification };

// A benchmark target. SyntheticStochastic problems expose a noisy objective
// (maximization convention) plus an optional noisy feasibility oracle;
// StreamClassification problems carry a pre-batched labelled stream.
// Evaluations are deterministic functions of (x, eval_seed).
struct Problem {
  ProblemKind kind = ProblemKind::SyntheticStochastic;
  std::string name;
  BoxBounds bounds;
  std::uint64_t instance_seed = 0;

  double noise_sd = 5.0;
  double flip_prob = 0.05;
  Eigen::RowVectorXd feasible_center;  // empty when unconstrained
  double feasible_radius = 0.0;

  // Documented best feasible objective (informational, for reports).
  Eigen::RowVectorXd best_feasible_x;
  double best_feasible_value = 0.0;

  StreamBatches stream;  // StreamClassification only

  int dim() const { return bounds.dim(); }
  bool has_feasibility() const { return feasible_center.size() > 0; }

  double evaluate(const Eigen::VectorXd& x, std::uint64_t eval_seed) const;
  int evaluate_success(const Eigen::VectorXd& x, std::uint64_t eval_seed) const;
};

double branin(double x1, double x2);

// name "noisy-branin-disk": objective -Branin + N(0, noise_sd^2) over
// [-5,10] x [0,15]; success = inside the radius-4 disk at (3, 7.5), label
// flipped with probability flip_prob.
Problem generate_constrained_problem(const std::string& name,
                                     std::uint64_t seed);

Problem make_stream_problem(StreamBatches stream, std::string name);

}  // namespace dualgp
