#include "dualgp/batch_fantasy.hpp"

#include <stdexcept>

#include "dualgp/rng.hpp"

namespace dualgp {

namespace {
constexpr double kDuplicateDistance = 1e-9;
constexpr int kDuplicateRetries = 3;
}  // namespace

FantasyBatch fantasize_batch(const SurrogateModels& models,
                             const AcquisitionSpec& spec,
                             const BoxBounds& bounds, int k, int budget,
                             std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("batch size must be >= 1");
  bounds.validate();

  // All conditioning happens on clones; the caller's states stay untouched.
  DualState reg, clf;
  SurrogateModels working;
  if (models.regression != nullptr) {
    reg = clone_state(*models.regression);
    working.regression = &reg;
  }
  if (models.classification != nullptr) {
    clf = clone_state(*models.classification);
    working.classification = &clf;
  }
  const bool has_reg = working.regression != nullptr;
  const bool has_clf = working.classification != nullptr;

  const int d = bounds.dim();
  FantasyBatch batch;
  batch.points.resize(k, d);
  batch.fantasized_values.resize(k);
  batch.fantasized_labels.resize(has_clf ? k : 0);
  batch.acq_values.resize(k);

  for (int i = 0; i < k; ++i) {
    const auto is_duplicate = [&](const Eigen::VectorXd& x) {
      for (int j = 0; j < i; ++j)
        if ((batch.points.row(j).transpose() - x).norm() < kDuplicateDistance)
          return true;
      return false;
    };

    MaximizerResult pick = maximize_acquisition(
        spec, working, bounds, budget, sub_seed(seed, 0xba7c4ULL, i));

    // Near-duplicates make the batch degenerate; retry the maximizer on a
    // fresh candidate stream before giving up.
    for (int attempt = 1; attempt <= kDuplicateRetries && is_duplicate(pick.x);
         ++attempt) {
      pick = maximize_acquisition(spec, working, bounds, budget,
                                  sub_seed(seed, 0xd0bb1eULL, i * 16 + attempt));
    }
    if (is_duplicate(pick.x)) batch.duplicate_warning = true;

    batch.points.row(i) = pick.x.transpose();
    batch.acq_values[i] = pick.value;

    const Eigen::MatrixXd xrow = pick.x.transpose();
    if (has_reg) {
      const double fantasy_y = predict(*working.regression, xrow, false).mean[0];
      batch.fantasized_values[i] = fantasy_y;
      reg = dual_condition(
          reg, make_dataset(xrow, Eigen::VectorXd::Constant(1, fantasy_y),
                            OutputDomain::Real));
    }
    if (has_clf) {
      const double prob = predict_y(*working.classification, xrow)[0];
      const double label = prob >= 0.5 ? 1.0 : 0.0;
      batch.fantasized_labels[i] = label;
      if (!has_reg) batch.fantasized_values[i] = label;
      clf = dual_condition(
          clf, make_dataset(xrow, Eigen::VectorXd::Constant(1, label),
                            OutputDomain::Binary));
    }
  }
  return batch;
}

}  // namespace dualgp
