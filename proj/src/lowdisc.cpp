#include "dualgp/lowdisc.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dualgp/rng.hpp"

namespace dualgp {

namespace {

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int cand = 2; static_cast<int>(primes.size()) < count; ++cand) {
    bool ok = true;
    for (int p : primes) {
      if (p * p > cand) break;
      if (cand % p == 0) {
        ok = false;
        break;
      }
    }
    if (ok) primes.push_back(cand);
  }
  return primes;
}

}  // namespace

Eigen::MatrixXd lowdisc_unit(int n, int dim, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("point count must be >= 0");
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");

  const std::vector<int> primes = first_primes(dim);
  Eigen::MatrixXd P(n, dim);
  for (int d = 0; d < dim; ++d) {
    const int base = primes[d];
    // Random digit permutation with sigma(0) = 0; otherwise trailing zero
    // digits of the index would stop mapping to zero and the sequence would
    // lose its equidistribution.
    std::vector<int> sigma(base);
    std::iota(sigma.begin(), sigma.end(), 0);
    auto rng = make_rng(sub_seed(seed, 0x10d15cULL, static_cast<std::uint64_t>(d)));
    std::shuffle(sigma.begin() + 1, sigma.end(), rng);

    for (int i = 0; i < n; ++i) {
      // Radical inverse of (i + 1) in the scrambled base; index shifted by
      // one to skip the all-zeros origin point.
      double value = 0.0, scale = 1.0 / base;
      for (int k = i + 1; k > 0; k /= base) {
        value += sigma[k % base] * scale;
        scale /= base;
      }
      P(i, d) = value;
    }
  }
  return P;
}

Eigen::MatrixXd lowdisc_points(int n, const BoxBounds& bounds,
                               std::uint64_t seed) {
  bounds.validate();
  Eigen::MatrixXd P = lowdisc_unit(n, bounds.dim(), seed);
  for (int d = 0; d < bounds.dim(); ++d)
    P.col(d) = bounds.lower[d] +
               (bounds.upper[d] - bounds.lower[d]) * P.col(d).array();
  return P;
}

}  // namespace dualgp
