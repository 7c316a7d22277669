#include "dualgp/problems.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "dualgp/rng.hpp"

namespace dualgp {

void BoxBounds::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw std::invalid_argument("bounds must have matching nonzero dimensions");
  if (!lower.allFinite() || !upper.allFinite())
    throw std::invalid_argument("bounds must be finite");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw std::invalid_argument("bounds must satisfy lower < upper in every "
                                  "coordinate (violated at " +
                                  std::to_string(i) + ")");
}

bool BoxBounds::contains(const Eigen::VectorXd& x) const {
  if (x.size() != lower.size()) return false;
  return (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

Eigen::VectorXd BoxBounds::clip(const Eigen::VectorXd& x) const {
  if (x.size() != lower.size())
    throw std::invalid_argument("clip: point dimension does not match bounds");
  return x.cwiseMax(lower).cwiseMin(upper);
}

BoxBounds make_bounds(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  BoxBounds b{std::move(lower), std::move(upper)};
  b.validate();
  return b;
}

double branin(double x1, double x2) {
  constexpr double kPi = 3.14159265358979323846;
  const double b = 5.1 / (4.0 * kPi * kPi);
  const double c = 5.0 / kPi;
  const double t = 1.0 / (8.0 * kPi);
  const double inner = x2 - b * x1 * x1 + c * x1 - 6.0;
  return inner * inner + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

namespace {

// Folds the point's coordinate bit patterns into the seed so evaluations at
// different x draw independent noise even under a reused eval_seed.
std::uint64_t point_hash(const Eigen::VectorXd& x, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(double));
    std::memcpy(&bits, &x[i], sizeof(bits));
    h = splitmix64(h ^ bits);
  }
  return h;
}

}  // namespace

double Problem::evaluate(const Eigen::VectorXd& x,
                         std::uint64_t eval_seed) const {
  if (kind != ProblemKind::SyntheticStochastic)
    throw std::invalid_argument("problem '" + name + "' has no objective");
  if (x.size() != bounds.lower.size())
    throw std::invalid_argument("evaluate: point dimension does not match problem");
  auto rng = make_rng(point_hash(x, sub_seed(instance_seed ^ eval_seed, 0x0b9ec7ULL)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  return -branin(x[0], x[1]) + noise_sd * gauss(rng);
}

int Problem::evaluate_success(const Eigen::VectorXd& x,
                              std::uint64_t eval_seed) const {
  if (!has_feasibility())
    throw std::invalid_argument("problem '" + name + "' has no feasibility oracle");
  if (x.size() != bounds.lower.size())
    throw std::invalid_argument("evaluate_success: point dimension does not match problem");
  const bool inside =
      (x.transpose() - feasible_center).norm() <= feasible_radius;
  auto rng = make_rng(point_hash(x, sub_seed(instance_seed ^ eval_seed, 0x5cce55ULL)));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const bool flip = unif(rng) < flip_prob;
  return (inside != flip) ? 1 : 0;
}

Problem generate_constrained_problem(const std::string& name,
                                     std::uint64_t seed) {
  if (name != "noisy-branin-disk")
    throw std::invalid_argument("unknown problem '" + name +
                                "' (expected \"noisy-branin-disk\")");
  Problem p;
  p.kind = ProblemKind::SyntheticStochastic;
  p.name = name;
  p.instance_seed = seed;
  p.bounds = make_bounds((Eigen::VectorXd(2) << -5.0, 0.0).finished(),
                         (Eigen::VectorXd(2) << 10.0, 15.0).finished());
  p.noise_sd = 5.0;
  p.flip_prob = 0.05;
  p.feasible_center = (Eigen::RowVectorXd(2) << 3.0, 7.5).finished();
  p.feasible_radius = 4.0;
  // No Branin minimum lies inside the disk; the feasible optimum sits on the
  // disk's lower boundary nearest the central valley.
  p.best_feasible_x = (Eigen::RowVectorXd(2) << 2.9573, 3.5002).finished();
  p.best_feasible_value = -1.7207;
  return p;
}

Problem make_stream_problem(StreamBatches stream, std::string name) {
  stream.validate();
  if (stream.batches.empty())
    throw std::invalid_argument("stream problem needs at least one batch");
  Problem p;
  p.kind = ProblemKind::StreamClassification;
  p.name = std::move(name);
  const Dataset all = stream.concat();
  Eigen::VectorXd lo = all.X.colwise().minCoeff();
  Eigen::VectorXd hi = all.X.colwise().maxCoeff();
  // Degenerate extents still need a valid box.
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) hi[i] = lo[i] + 1.0;
  p.bounds = make_bounds(std::move(lo), std::move(hi));
  p.stream = std::move(stream);
  return p;
}

}  // namespace dualgp
