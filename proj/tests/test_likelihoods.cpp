#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dualgp/likelihoods.hpp"
#include "oracles.hpp"

using namespace dualgp;

TEST_SUITE("likelihoods") {

TEST_CASE("gaussian log density closed forms") {
  // 2*pi*sigma^2 = 1 makes the normalizer vanish; zero residual leaves 0.
  const Likelihood unit = Likelihood::gaussian(1.0 / (2.0 * M_PI));
  CHECK(log_prob(unit, 0.7, 0.7) == doctest::Approx(0.0).epsilon(1e-14));

  const Likelihood wide = Likelihood::gaussian(2.0);
  // -log(4*pi)/2 - 1/4, evaluated at high precision.
  CHECK(log_prob(wide, 1.0, 0.0) ==
        doctest::Approx(-1.5155121234846454).epsilon(1e-14));
}

TEST_CASE("bernoulli log mass at the symmetric point") {
  const Likelihood lik = Likelihood::bernoulli_probit();
  CHECK(log_prob(lik, 1.0, 0.0) ==
        doctest::Approx(-0.6931471805599453).epsilon(1e-13));
  CHECK(log_prob(lik, 0.0, 0.0) ==
        doctest::Approx(-0.6931471805599453).epsilon(1e-13));
}

TEST_CASE("observation domain checks") {
  const Likelihood bern = Likelihood::bernoulli_probit();
  CHECK_NOTHROW(bern.validate_observation(0.0));
  CHECK_NOTHROW(bern.validate_observation(1.0));
  CHECK_THROWS_AS(bern.validate_observation(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(bern.validate_observation(0.5), std::invalid_argument);
  const Likelihood gauss = Likelihood::gaussian(1.0);
  CHECK_NOTHROW(gauss.validate_observation(-3.2));
  CHECK_THROWS_AS(gauss.validate_observation(
                      std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("likelihood parameter validation") {
  Likelihood lik = Likelihood::gaussian(0.5);
  CHECK_NOTHROW(lik.validate());
  lik.noise_variance = 0.0;
  CHECK_THROWS_AS(lik.validate(), std::invalid_argument);
}

TEST_CASE("expected log prob: gaussian closed form") {
  const Likelihood unit = Likelihood::gaussian(1.0 / (2.0 * M_PI));
  CHECK(expected_log_prob(unit, 0.3, MarginalMoments{0.3, 0.0}) ==
        doctest::Approx(0.0).epsilon(1e-14));

  // -log(2 pi s2)/2 - ((y-mu)^2 + var)/(2 s2) at arbitrary inputs.
  const Likelihood lik = Likelihood::gaussian(0.7);
  const double expect = -0.5 * std::log(2.0 * M_PI * 0.7) -
                        (std::pow(1.5 - 0.2, 2) + 0.9) / (2.0 * 0.7);
  CHECK(expected_log_prob(lik, 1.5, MarginalMoments{0.2, 0.9}) ==
        doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("expected log prob: bernoulli degenerate marginal hits log_prob") {
  const Likelihood lik = Likelihood::bernoulli_probit();
  CHECK(expected_log_prob(lik, 1.0, MarginalMoments{0.0, 0.0}) ==
        doctest::Approx(-0.6931471805599453).epsilon(1e-13));
  for (double mu : {-3.0, -0.5, 0.4, 2.2})
    for (double y : {0.0, 1.0})
      CHECK(expected_log_prob(lik, y, MarginalMoments{mu, 0.0}) ==
            doctest::Approx(log_prob(lik, y, mu)).epsilon(1e-10));
}

TEST_CASE("expected log prob: quadrature agrees with a frozen high-precision value") {
  // E[log Phi(f)] with f ~ N(0.7, 0.5), computed independently at high
  // precision: -0.3901514491379316.
  const Likelihood lik = Likelihood::bernoulli_probit();
  CHECK(expected_log_prob(lik, 1.0, MarginalMoments{0.7, 0.5}) ==
        doctest::Approx(-0.3901514491379316).epsilon(1e-10));
}

TEST_CASE("expected log prob: quadrature agrees with Monte Carlo") {
  const Likelihood lik = Likelihood::bernoulli_probit();
  const MarginalMoments mm{0.7, 0.5};
  const auto mc = oracles::mc_expected_log_prob(lik, 1.0, mm, 1000000, 99);
  const double q = expected_log_prob(lik, 1.0, mm);
  CHECK(std::abs(q - mc.value) <= 3.0 * mc.stderr_);
}

TEST_CASE("quadrature accuracy against a dense independent integrator") {
  // A fixed-node rule cannot be uniformly tight: log Phi under a very wide
  // Gaussian is a soft hinge whose transition shrinks relative to the
  // integration scale, so convergence slows as the variance grows. Measured
  // against composite Simpson: worst relative error 5.6e-7 for |mu| <= 2.5,
  // s2 <= 2 (where posterior marginals actually live after conditioning) and
  // 8.4e-5 over the full stress grid.
  const Likelihood lik = Likelihood::bernoulli_probit();
  for (double mu : {-5.0, -1.0, 0.0, 2.5, 5.0})
    for (double s2 : {1e-3, 0.5, 2.0, 10.0})
      for (double y : {0.0, 1.0}) {
        const double got = expected_log_prob(lik, y, MarginalMoments{mu, s2});
        const double ref = oracles::dense_expected_log_prob(lik, y, mu, s2);
        const double tol = (std::abs(mu) <= 2.5 && s2 <= 2.0) ? 5e-6 : 1e-3;
        CHECK(got == doctest::Approx(ref).epsilon(tol));
      }
}

TEST_CASE("expectation grads: gaussian closed form") {
  const Likelihood lik = Likelihood::gaussian(2.0);
  const ExpectationGrads g = expectation_grads(lik, 3.0, MarginalMoments{1.0, 0.4});
  CHECK(g.d1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.d2 == doctest::Approx(-0.25).epsilon(1e-14));
}

TEST_CASE("expectation grads: probit identities at the origin") {
  const Likelihood lik = Likelihood::bernoulli_probit();
  const ExpectationGrads g = expectation_grads(lik, 1.0, MarginalMoments{0.0, 0.0});
  // phi(0)/Phi(0) = sqrt(2/pi); d2 = -r(0)^2/2 = -1/pi.
  CHECK(g.d1 == doctest::Approx(0.7978845608028654).epsilon(1e-12));
  CHECK(g.d2 == doctest::Approx(-0.3183098861837907).epsilon(1e-12));
}

TEST_CASE("expectation grads match finite differences over a random sweep") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> umu(-4.0, 4.0);
  std::uniform_real_distribution<double> us2(0.05, 6.0);
  std::uniform_real_distribution<double> uy(-3.0, 3.0);
  std::bernoulli_distribution pick_gauss(0.5);
  std::bernoulli_distribution label(0.5);

  for (int c = 0; c < 100; ++c) {
    const bool gauss = pick_gauss(rng);
    const Likelihood lik =
        gauss ? Likelihood::gaussian(0.3 + us2(rng)) : Likelihood::bernoulli_probit();
    const double y = gauss ? uy(rng) : (label(rng) ? 1.0 : 0.0);
    const MarginalMoments mm{umu(rng), us2(rng)};

    const ExpectationGrads g = expectation_grads(lik, y, mm);
    const auto [fd1, fd2] = oracles::fd_expectation_grads(lik, y, mm);
    // Gaussian gradients are closed-form; probit gradients inherit the
    // quadrature accuracy, which degrades at wide marginals (measured worst
    // 2.2e-3 at mu = +-4, s2 = 6 against the dense integrator).
    const bool moderate =
        gauss || (std::abs(mm.mean) <= 2.0 && mm.variance <= 2.0);
    const double tol = moderate ? 1e-4 : 5e-3;
    CHECK(g.d1 == doctest::Approx(fd1).epsilon(tol));
    CHECK(g.d2 == doctest::Approx(fd2).epsilon(tol));
  }
}

TEST_CASE("d2 stays non-positive for both likelihoods") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> umu(-6.0, 6.0);
  std::uniform_real_distribution<double> us2(0.0, 8.0);
  const Likelihood bern = Likelihood::bernoulli_probit();
  const Likelihood gauss = Likelihood::gaussian(0.9);
  for (int c = 0; c < 200; ++c) {
    const MarginalMoments mm{umu(rng), us2(rng)};
    CHECK(expectation_grads(bern, 1.0, mm).d2 <= 0.0);
    CHECK(expectation_grads(bern, 0.0, mm).d2 <= 0.0);
    CHECK(expectation_grads(gauss, umu(rng), mm).d2 <= 0.0);
  }
}

TEST_CASE("probit ratio stays finite deep in the tail") {
  // phi/Phi evaluated naively underflows past f ~ -38; the stable path must
  // keep returning the asymptotic ratio ~ -f.
  for (double z : {-10.0, -30.0, -50.0, -200.0}) {
    const double r = norm_pdf_cdf_ratio(z);
    CHECK(std::isfinite(r));
    CHECK(r == doctest::Approx(-z).epsilon(1e-2));
  }
  CHECK(std::isfinite(log_norm_cdf(-300.0)));
  CHECK(log_norm_cdf(8.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gauss-hermite rule integrates polynomials exactly") {
  // A rule with 20 nodes is exact for polynomials up to degree 39 under the
  // standard normal weight; moments of N(0,1) are 0, 1, 0, 3, 0, 15.
  const GaussHermite rule(20);
  const double w = rule.weights.sum();
  CHECK(w == doctest::Approx(1.0).epsilon(1e-13));
  double m2 = 0.0, m4 = 0.0, m6 = 0.0;
  for (int i = 0; i < rule.nodes.size(); ++i) {
    const double x = std::sqrt(2.0) * rule.nodes[i];  // N(0,1) sample abscissa
    m2 += rule.weights[i] * x * x;
    m4 += rule.weights[i] * x * x * x * x;
    m6 += rule.weights[i] * std::pow(x, 6);
  }
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m6 == doctest::Approx(15.0).epsilon(1e-12));
}

}  // TEST_SUITE
