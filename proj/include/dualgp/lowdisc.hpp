#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "dualgp/bounds.hpp"

namespace dualgp {

// Scrambled-Halton low-discrepancy points in [0,1)^dim, one row per point.
// Digit permutations are drawn per dimension from the seed (zero digit kept
// fixed so the radical inverse stays in [0,1)); deterministic by seed.
Eigen::MatrixXd lowdisc_unit(int n, int dim, std::uint64_t seed);

// The same points mapped affinely into the box.
Eigen::MatrixXd lowdisc_points(int n, const BoxBounds& bounds,
                               std::uint64_t seed);

}  // namespace dualgp
