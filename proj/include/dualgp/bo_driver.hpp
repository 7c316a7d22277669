#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "dualgp/batch_fantasy.hpp"
#include "dualgp/config.hpp"
#include "dualgp/problems.hpp"

namespace dualgp {

struct BOIterationRecord {
  FantasyBatch batch;
  Eigen::VectorXd observed_y;
  Eigen::VectorXi observed_success;  // empty when the problem is unconstrained
  double incumbent = 0.0;            // running best, after this iteration
  double elbo_reg = 0.0;
  double elbo_clf = 0.0;  // NaN when no classifier is in play
  double wall_ms = 0.0;
  bool error = false;
  std::string error_message;
};

struct BOHistory {
  Eigen::MatrixXd init_X;
  Eigen::VectorXd init_y;
  Eigen::VectorXi init_success;  // empty when unconstrained
  double init_incumbent = 0.0;
  std::vector<BOIterationRecord> iterations;
  bool error = false;
  std::string error_message;
};

// The outer loop: evaluate an initial low-discrepancy design, then per
// iteration fantasize a batch, evaluate the real problem, append, re-select
// inducing points, re-tune hyperparameters, refit from scratch, and record.
// The incumbent is the best OBSERVED objective among feasible-labelled
// points (all points when unconstrained), kept monotone; while nothing is
// feasible yet it is floored at min(observed y) - 1 so improvement stays
// well-defined. Deterministic given (config, seed); a failed problem
// evaluation aborts the loop and returns the history with its error flag.
BOHistory run_bo(const Problem& problem, const ExperimentConfig& config,
                 std::uint64_t seed);

// ELBO-guided hyperparameter refresh: Nelder-Mead over log(theta) with at
// most max_evals objective evaluations, each one refitting dual parameters
// from scratch at the candidate theta on all data. The incoming theta wins
// unless a strictly better ELBO is found, so the returned (refitted) state
// never has a lower ELBO than the input. max_evals = 0 returns the input
// state refitted as-is.
DualState update_hyperparameters(const DualState& state, const Dataset& data,
                                 const FitOptions& fit_options, int max_evals);

// Re-selects Z as k-means centroids over all inputs (fixed 25 Lloyd
// iterations, seeded init) and refits from scratch: conditioning identities
// do not survive a Z change. m falling above n is clamped to n; the optional
// flag reports that.
DualState update_inducing(const DualState& state, const Dataset& data, int m,
                          const FitOptions& fit_options, std::uint64_t seed,
                          bool* m_clamped = nullptr);

struct StreamResult {
  std::vector<DualState> states;  // posterior after each batch
  std::vector<bool> fit_converged;  // [0]: batch-1 fit; [1]: offline fit
  DualState offline_state;        // same Z and theta, trained on all data

  // predict_y surfaces on a 50 x 50 grid over the data bounding box
  // (2-d inputs only; empty otherwise). grids[b] follows batch b.
  Eigen::VectorXd grid_xs, grid_ys;
  std::vector<Eigen::MatrixXd> grids;
  Eigen::MatrixXd offline_grid;

  double grid_gap = 0.0;  // mean abs gap, final streamed grid vs offline
  double train_accuracy_streamed = 0.0;  // binary streams; NaN otherwise
  double train_accuracy_offline = 0.0;
};

// Streaming protocol: batch 1 is fitted from scratch, batches 2..B are
// folded in by dual_condition only, with Z (k-means on batch 1) and theta
// (from the config) fixed throughout. The offline oracle shares that Z and
// theta and sees all data at once, so the gap isolates conditioning quality.
StreamResult run_streaming(const Problem& problem,
                           const ExperimentConfig& config, std::uint64_t seed);

}  // namespace dualgp
