#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "dualgp/data_io.hpp"
#include "dualgp/dual_svgp.hpp"
#include "dualgp/errors.hpp"
#include "dualgp/optim.hpp"
#include "dualgp/problems.hpp"
#include "dualgp/rng.hpp"
#include "oracles.hpp"

using namespace dualgp;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

double svgp_train_accuracy(const Dataset& data, std::uint64_t seed) {
  KernelParams params;
  params.variance = 3.0;
  params.lengthscales = Eigen::VectorXd::Constant(2, 0.7);
  const Eigen::MatrixXd Z = kmeans_centroids(data.X, 25, 25, sub_seed(seed, 7));
  DualState s = make_state(KernelKind::Matern52, params,
                           Likelihood::bernoulli_probit(), InducingSet(Z));
  const FitResult r = fit(s, data);
  const Eigen::VectorXd p = predict_y(r.state, data.X);
  double correct = 0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    correct += ((p[i] >= 0.5) == (data.y[i] == 1.0)) ? 1.0 : 0.0;
  return correct / static_cast<double>(data.n());
}

}  // namespace

TEST_SUITE("data_io") {

TEST_CASE("output domain tags round-trip and reject junk") {
  CHECK(domain_from_string("real") == OutputDomain::Real);
  CHECK(domain_from_string("binary") == OutputDomain::Binary);
  CHECK(to_string(OutputDomain::Real) == "real");
  CHECK(to_string(OutputDomain::Binary) == "binary");
  CHECK_THROWS_AS((void)domain_from_string("categorical"), ConfigError);
}

TEST_CASE("dataset validation catches shape, finiteness, and label faults") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  CHECK_NOTHROW((void)make_dataset(X, y, OutputDomain::Real));
  CHECK_NOTHROW((void)make_dataset(X, y, OutputDomain::Binary));

  CHECK_THROWS_AS(
      (void)make_dataset(X, Eigen::VectorXd::Zero(2), OutputDomain::Real),
      std::invalid_argument);

  Eigen::MatrixXd Xbad = X;
  Xbad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)make_dataset(Xbad, y, OutputDomain::Real),
                  std::invalid_argument);

  Eigen::VectorXd ybad = y;
  ybad[2] = 0.5;
  CHECK_THROWS_AS((void)make_dataset(X, ybad, OutputDomain::Binary),
                  std::invalid_argument);
  CHECK_NOTHROW((void)make_dataset(X, ybad, OutputDomain::Real));
}

TEST_CASE("concat stacks in order and rejects mismatches") {
  Dataset a = make_dataset((Eigen::MatrixXd(2, 1) << 1, 2).finished(),
                           (Eigen::VectorXd(2) << 10, 20).finished(),
                           OutputDomain::Real);
  Dataset b = make_dataset((Eigen::MatrixXd(1, 1) << 3).finished(),
                           (Eigen::VectorXd(1) << 30).finished(),
                           OutputDomain::Real);
  const Dataset ab = concat(a, b);
  CHECK(ab.n() == 3);
  CHECK(ab.X(2, 0) == 3.0);
  CHECK(ab.y[0] == 10.0);
  CHECK(ab.y[2] == 30.0);

  Dataset empty;
  const Dataset same = concat(empty, a);
  CHECK((same.X - a.X).cwiseAbs().maxCoeff() == 0.0);

  Dataset bin = make_dataset(b.X, Eigen::VectorXd::Zero(1), OutputDomain::Binary);
  CHECK_THROWS_AS((void)concat(a, bin), std::invalid_argument);
  Dataset wide = make_dataset(Eigen::MatrixXd::Zero(1, 2),
                              Eigen::VectorXd::Zero(1), OutputDomain::Real);
  CHECK_THROWS_AS((void)concat(a, wide), std::invalid_argument);
}

TEST_CASE("banana batches are balanced, standardized, and class-mixed") {
  const StreamBatches s = generate_banana(100, 4, 0);
  REQUIRE(s.batches.size() == 4);
  for (const auto& b : s.batches) {
    CHECK(b.n() == 100);
    CHECK(b.dim() == 2);
    CHECK(b.domain == OutputDomain::Binary);
    // Round-robin dealing must leave both classes in every batch.
    CHECK(b.y.sum() > 0.0);
    CHECK(b.y.sum() < static_cast<double>(b.n()));
  }

  const Dataset all = s.concat();
  REQUIRE(all.n() == 400);
  const double frac1 = all.y.mean();
  CHECK(frac1 >= 0.4);
  CHECK(frac1 <= 0.6);
  CHECK(frac1 == 0.5);  // the generator balances exactly

  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(all.X.col(j).mean()) < 1e-10);
    const double sd = std::sqrt(
        (all.X.col(j).array() - all.X.col(j).mean()).square().mean());
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("banana is deterministic by seed") {
  const Dataset a = generate_banana(50, 2, 12).concat();
  const Dataset b = generate_banana(50, 2, 12).concat();
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  const Dataset c = generate_banana(50, 2, 13).concat();
  CHECK((a.X - c.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("banana rejects degenerate sizes and splits odd totals evenly") {
  CHECK_THROWS_AS((void)generate_banana(9, 4, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)generate_banana(100, 0, 0), std::invalid_argument);

  const StreamBatches s = generate_banana(11, 1, 5);
  REQUIRE(s.batches.size() == 1);
  CHECK(s.batches[0].n() == 11);
  // Odd draw: class counts differ by exactly one.
  CHECK(std::abs(s.batches[0].y.sum() - 5.5) == 0.5);
}

TEST_CASE("banana classes defeat a linear classifier but not the sparse GP") {
  // Interlocking crescents: a linear probit fit caps well below the level a
  // nonstationary-boundary-capable classifier reaches on the same points.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset all = generate_banana(100, 4, seed).concat();
    CHECK(oracles::linear_probit_accuracy(all.X, all.y) < 0.75);
  }
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Dataset all = generate_banana(100, 4, seed).concat();
    CHECK(svgp_train_accuracy(all, seed) >= 0.85);
  }
}

TEST_CASE("branin closed form hits its known optima") {
  // All three global minimizers share the value 0.397887...
  CHECK(branin(3.14159265358979323846, 2.275) ==
        doctest::Approx(0.39788735772973834).epsilon(1e-12));
  CHECK(branin(-3.14159265358979323846, 12.275) ==
        doctest::Approx(0.39788735772973834).epsilon(1e-6));
  CHECK(branin(9.42478, 2.475) ==
        doctest::Approx(0.39788735772973834).epsilon(1e-4));
}

TEST_CASE("constrained problem: noise model, feasibility, determinism") {
  const Problem p = generate_constrained_problem("noisy-branin-disk", 3);
  CHECK(p.bounds.lower[0] == -5.0);
  CHECK(p.bounds.upper[0] == 10.0);
  CHECK(p.bounds.lower[1] == 0.0);
  CHECK(p.bounds.upper[1] == 15.0);
  CHECK(p.has_feasibility());

  CHECK_THROWS_AS((void)generate_constrained_problem("rosenbrock", 0),
                  std::invalid_argument);

  const Eigen::VectorXd x = (Eigen::VectorXd(2) << 1.0, 4.0).finished();
  CHECK(p.evaluate(x, 17) == p.evaluate(x, 17));
  CHECK(p.evaluate(x, 17) != p.evaluate(x, 18));
  CHECK_THROWS_AS((void)p.evaluate(Eigen::VectorXd::Zero(3), 0),
                  std::invalid_argument);

  // Noise is additive on -Branin: averaging many eval seeds recovers it.
  double acc = 0.0;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) acc += p.evaluate(x, static_cast<std::uint64_t>(r));
  const double mean = acc / reps;
  const double se = p.noise_sd / std::sqrt(static_cast<double>(reps));
  CHECK(std::abs(mean - (-branin(1.0, 4.0))) < 4.0 * se);

  // Disk center: success 1 except for the 5% flip; far corner: the reverse.
  const Eigen::VectorXd center = (Eigen::VectorXd(2) << 3.0, 7.5).finished();
  const Eigen::VectorXd corner = (Eigen::VectorXd(2) << -5.0, 0.0).finished();
  int in_hits = 0, out_hits = 0;
  for (int r = 0; r < reps; ++r) {
    in_hits += p.evaluate_success(center, static_cast<std::uint64_t>(r));
    out_hits += p.evaluate_success(corner, static_cast<std::uint64_t>(r));
  }
  CHECK(std::abs(in_hits / static_cast<double>(reps) - 0.95) < 0.02);
  CHECK(std::abs(out_hits / static_cast<double>(reps) - 0.05) < 0.02);
  CHECK(p.evaluate_success(center, 99) == p.evaluate_success(center, 99));
}

TEST_CASE("csv round-trips the banana draw exactly") {
  const Dataset data = generate_banana(30, 2, 21).concat();
  const std::string path = temp_path("dualgp_csv_roundtrip.csv");
  save_csv(data, path);
  const Dataset back = load_csv(path);
  CHECK(back.domain == OutputDomain::Binary);
  CHECK((back.X - data.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.y - data.y).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("csv header-only file loads as an empty dataset") {
  const std::string path = temp_path("dualgp_csv_empty.csv");
  {
    std::ofstream out(path);
    out << "x1,x2,y\n";
  }
  const Dataset d = load_csv(path);
  CHECK(d.n() == 0);
  CHECK(d.dim() == 2);
  std::remove(path.c_str());
}

TEST_CASE("csv parse errors name the offending line") {
  const std::string path = temp_path("dualgp_csv_bad.csv");
  {
    std::ofstream out(path);
    out << "x1,y\n";
    for (int i = 2; i <= 6; ++i) out << i << ".0," << i << "\n";
    out << "oops,7\n";  // line 7
  }
  try {
    (void)load_csv(path);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find(":7:") != std::string::npos);
  }
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "x1,y\n1.0,2.0,3.0\n";  // ragged: 3 cells for a 1-d dataset
  }
  CHECK_THROWS_AS((void)load_csv(path), std::invalid_argument);
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "a,b\n";  // header must end in y
  }
  CHECK_THROWS_AS((void)load_csv(path), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("csv infers binary only when every label is 0 or 1") {
  const std::string path = temp_path("dualgp_csv_domain.csv");
  {
    std::ofstream out(path);
    out << "x1,y\n0.0,0\n1.0,1\n";
  }
  CHECK(load_csv(path).domain == OutputDomain::Binary);
  {
    std::ofstream out(path);
    out << "x1,y\n0.0,0\n1.0,1.5\n";
  }
  CHECK(load_csv(path).domain == OutputDomain::Real);
  std::remove(path.c_str());
}

TEST_CASE("partition_stream splits contiguously and reassembles") {
  const Dataset data = generate_banana(100, 4, 2).concat();
  const StreamBatches s4 = partition_stream(data, 100);
  REQUIRE(s4.batches.size() == 4);
  for (const auto& b : s4.batches) CHECK(b.n() == 100);
  const Dataset back = s4.concat();
  CHECK((back.X - data.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.y - data.y).cwiseAbs().maxCoeff() == 0.0);

  Dataset five = make_dataset(Eigen::MatrixXd::Random(5, 1),
                              Eigen::VectorXd::Random(5), OutputDomain::Real);
  const StreamBatches s = partition_stream(five, 2);
  REQUIRE(s.batches.size() == 3);
  CHECK(s.batches[0].n() == 2);
  CHECK(s.batches[1].n() == 2);
  CHECK(s.batches[2].n() == 1);
  // Order preserved: batch 2 holds row 4.
  CHECK(s.batches[2].X(0, 0) == five.X(4, 0));

  CHECK_THROWS_AS((void)partition_stream(five, 0), std::invalid_argument);
}

TEST_CASE("stream problems expose bounds covering the data") {
  const StreamBatches s = generate_banana(50, 2, 9);
  const Problem p = make_stream_problem(s, "banana");
  const Dataset all = p.stream.concat();
  for (Eigen::Index i = 0; i < all.n(); ++i)
    CHECK(p.bounds.contains(all.X.row(i).transpose()));
  CHECK_THROWS_AS((void)p.evaluate(Eigen::VectorXd::Zero(2), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_stream_problem(StreamBatches{}, "empty"),
                  std::invalid_argument);
}

}  // TEST_SUITE
