#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "dualgp/bounds.hpp"
#include "dualgp/dual_svgp.hpp"

namespace dualgp {

enum class AcquisitionKind { ExpectedImprovement, SuccessProbability, ProductEISuccess };

AcquisitionKind acquisition_kind_from_string(const std::string& tag);
std::string to_string(AcquisitionKind kind);

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::ExpectedImprovement;
  double incumbent = 0.0;  // EI reference; ignored by SuccessProbability
  bool maximize = true;    // objective direction for improvement
};

// Non-owning views of the fitted surrogates an acquisition may need. EI
// requires regression (Gaussian likelihood), success probability requires
// classification (Bernoulli); the product requires both.
struct SurrogateModels {
  const DualState* regression = nullptr;
  const DualState* classification = nullptr;
};

// Plug-in expected improvement at a single point, maximization convention:
// EI = sigma (z Phi(z) + phi(z)) with z = (mu - incumbent) / sigma, and the
// degenerate limit max(mu - incumbent, 0) once sigma < 1e-12.
double expected_improvement(const DualState& reg_state,
                            const Eigen::RowVectorXd& x, double incumbent,
                            bool maximize = true);

// Predictive class probability of the classifier; delegates to predict_y.
double success_probability(const DualState& clf_state,
                           const Eigen::RowVectorXd& x);

double eval_acquisition(const AcquisitionSpec& spec, const SurrogateModels& models,
                        const Eigen::RowVectorXd& x);

// Vectorized evaluation over candidate rows; the single-point form above is
// the n = 1 case of this.
Eigen::VectorXd eval_acquisition_batch(const AcquisitionSpec& spec,
                                       const SurrogateModels& models,
                                       const Eigen::MatrixXd& X);

struct MaximizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
};

// Low-discrepancy candidate sweep (budget * 50 points) followed by
// Nelder-Mead refinement from the top 5 candidates, iterates clipped to the
// box. Deterministic by seed; candidate ties break toward the lowest index.
MaximizerResult maximize_acquisition(const AcquisitionSpec& spec,
                                     const SurrogateModels& models,
                                     const BoxBounds& bounds, int budget,
                                     std::uint64_t seed);

}  // namespace dualgp
