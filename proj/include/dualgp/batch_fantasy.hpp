#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "dualgp/acquisition.hpp"

namespace dualgp {

struct FantasyBatch {
  Eigen::MatrixXd points;            // k x d
  Eigen::VectorXd fantasized_values; // per point: regression fantasy (latent
                                     // mean), or the label when only a
                                     // classifier is in play
  Eigen::VectorXd fantasized_labels; // thresholded classifier fantasies;
                                     // empty without a classifier
  Eigen::VectorXd acq_values;        // acquisition value at each pick
  bool duplicate_warning = false;    // a pick stayed near-duplicate after retries
};

// Greedy Kriging-Believer batch construction: k rounds of maximize the
// acquisition, fantasize the observation at the chosen point (regression:
// predictive mean; classification: success probability thresholded at 0.5),
// and condition CLONES of the surrogates on the fantasy before the next
// round. The input states are never mutated. A pick landing within 1e-9 of
// an earlier batch member is retried with a fresh sub-seed up to 3 times,
// then accepted with duplicate_warning set.
FantasyBatch fantasize_batch(const SurrogateModels& models,
                             const AcquisitionSpec& spec,
                             const BoxBounds& bounds, int k, int budget,
                             std::uint64_t seed);

}  // namespace dualgp
