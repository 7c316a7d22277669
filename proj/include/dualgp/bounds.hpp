#pragma once

#include <Eigen/Core>

namespace dualgp {

// Axis-aligned search box; lower < upper strictly per coordinate.
struct BoxBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  void validate() const;
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clip(const Eigen::VectorXd& x) const;
};

BoxBounds make_bounds(Eigen::VectorXd lower, Eigen::VectorXd upper);

}  // namespace dualgp
