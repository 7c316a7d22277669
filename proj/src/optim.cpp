#include "dualgp/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dualgp/rng.hpp"

namespace dualgp {

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double initial_step, int max_evals,
    double xtol) {
  const int d = static_cast<int>(x0.size());
  if (d < 1) throw std::invalid_argument("nelder_mead: empty start point");
  if (max_evals < 1) throw std::invalid_argument("nelder_mead: max_evals must be >= 1");

  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  // Vertices the eval budget never reaches stay at x0 with an infinite value,
  // so they sort last instead of feeding garbage into the simplex.
  std::vector<Eigen::VectorXd> xs(d + 1, x0);
  std::vector<double> fs(d + 1, std::numeric_limits<double>::infinity());
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  fs[0] = eval(x0);
  for (int i = 0; i < d && evals < max_evals; ++i) {
    xs[i + 1][i] += initial_step;
    fs[i + 1] = eval(xs[i + 1]);
  }

  std::vector<int> order(d + 1);
  std::iota(order.begin(), order.end(), 0);
  auto sort_simplex = [&] {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
  };

  while (evals < max_evals) {
    sort_simplex();
    const int best = order[0], worst = order[d], second = order[d - 1];

    double spread = 0.0;
    for (int i = 1; i <= d; ++i)
      spread = std::max(spread,
                        (xs[order[i]] - xs[best]).cwiseAbs().maxCoeff());
    if (spread < xtol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= d;

    const Eigen::VectorXd xr = centroid + kReflect * (centroid - xs[worst]);
    const double fr = eval(xr);
    if (fr < fs[best]) {
      if (evals < max_evals) {
        const Eigen::VectorXd xe = centroid + kExpand * (xr - centroid);
        const double fe = eval(xe);
        if (fe < fr) {
          xs[worst] = xe;
          fs[worst] = fe;
          continue;
        }
      }
      xs[worst] = xr;
      fs[worst] = fr;
      continue;
    }
    if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
      continue;
    }
    if (evals >= max_evals) break;
    const Eigen::VectorXd xc =
        fr < fs[worst] ? centroid + kContract * (xr - centroid)
                       : centroid + kContract * (xs[worst] - centroid);
    const double fc = eval(xc);
    if (fc < std::min(fr, fs[worst])) {
      xs[worst] = xc;
      fs[worst] = fc;
      continue;
    }
    for (int i = 0; i <= d && evals < max_evals; ++i) {
      if (i == best) continue;
      xs[i] = xs[best] + kShrink * (xs[i] - xs[best]);
      fs[i] = eval(xs[i]);
    }
  }

  sort_simplex();
  return {xs[order[0]], fs[order[0]], evals};
}

Eigen::MatrixXd kmeans_centroids(const Eigen::MatrixXd& X, int k,
                                 int lloyd_iters, std::uint64_t seed) {
  const Eigen::Index n = X.rows();
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (n < k) throw std::invalid_argument("kmeans: fewer points than centroids");

  auto rng = make_rng(sub_seed(seed, 0x6ea75ULL));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // k-means++ seeding: each next centroid drawn with probability proportional
  // to squared distance from the chosen set, so duplicates of already-chosen
  // rows have zero mass.
  Eigen::MatrixXd C(k, X.cols());
  C.row(0) = X.row(static_cast<Eigen::Index>(unif(rng) * n) % n);
  Eigen::VectorXd d2 =
      (X.rowwise() - C.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = unif(rng) * total, acc = 0.0;
      for (pick = 0; pick < n - 1; ++pick) {
        acc += d2[pick];
        if (acc >= target) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(unif(rng) * n) % n;
    }
    C.row(c) = X.row(pick);
    d2 = d2.cwiseMin((X.rowwise() - C.row(c)).rowwise().squaredNorm());
  }

  std::vector<Eigen::Index> assign(n);
  for (int iter = 0; iter < lloyd_iters; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double bestd = (X.row(i) - C.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dist = (X.row(i) - C.row(c)).squaredNorm();
        if (dist < bestd) {
          bestd = dist;
          best = c;
        }
      }
      assign[i] = best;
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[i]) += X.row(i);
      counts[assign[i]] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0.0) {
        C.row(c) = sums.row(c) / counts[c];
      } else {
        // Re-seed an emptied cluster to the point farthest from its centroid.
        Eigen::Index far = 0;
        double fard = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double dist = (X.row(i) - C.row(assign[i])).squaredNorm();
          if (dist > fard) {
            fard = dist;
            far = i;
          }
        }
        C.row(c) = X.row(far);
      }
    }
  }

  // Centroids must be pairwise distinct to serve as inducing points; nudge
  // any collision onto a data point not already in the set.
  for (int c = 0; c < k; ++c) {
    for (int c2 = 0; c2 < c; ++c2) {
      if ((C.row(c) - C.row(c2)).norm() > 0.0) continue;
      for (Eigen::Index i = 0; i < n; ++i) {
        bool taken = false;
        for (int c3 = 0; c3 < k; ++c3)
          if ((X.row(i) - C.row(c3)).norm() == 0.0) taken = true;
        if (!taken) {
          C.row(c) = X.row(i);
          break;
        }
      }
    }
  }

  // When the data has fewer than k distinct rows no nudge target exists, so
  // drop the collided centroids instead of returning duplicates.
  std::vector<int> keep;
  for (int c = 0; c < k; ++c) {
    bool dup = false;
    for (int idx : keep)
      if ((C.row(c) - C.row(idx)).norm() == 0.0) dup = true;
    if (!dup) keep.push_back(c);
  }
  if (static_cast<int>(keep.size()) == k) return C;
  Eigen::MatrixXd reduced(static_cast<Eigen::Index>(keep.size()), X.cols());
  for (size_t i = 0; i < keep.size(); ++i) reduced.row(i) = C.row(keep[i]);
  return reduced;
}

}  // namespace dualgp
