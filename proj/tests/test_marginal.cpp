#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gmix/errors.hpp"
#include "gmix/marginal.hpp"
#include "gmix/quadrature.hpp"
#include "gmix/rng.hpp"
#include "gmix/simulation.hpp"
#include "oracles.hpp"

using namespace gmix;

namespace {

Dataset simulated(int n, int p, std::uint64_t seed) {
  return generate_dataset(n, p, Scheme::kTable1, ErrorDist::kNormal, seed).first;
}

}  // namespace

TEST_CASE("log-space quadrature reproduces closed-form integrals") {
  // Standard normal over (0,1) after an affine squeeze: int_0^1 exp(-(s-1/2)^2) ds
  const auto logf = [](double s) {
    const double t = s - 0.5;
    return -t * t;
  };
  const double breaks[] = {0.25, 0.5, 0.75};
  const auto res = log_adaptive_gk15(logf, 0.0, 1.0, breaks, {1e-12, 50000});
  const double exact = std::sqrt(std::numbers::pi) * std::erf(0.5);
  CHECK(res.log_value == doctest::Approx(std::log(exact)).epsilon(1e-12));
  CHECK(res.rel_err < 1e-10);

  // A sharply scaled exponential: int_0^1 exp(-1000 s) ds, huge dynamic range.
  const auto sharp = [](double s) { return -1000.0 * s; };
  const auto res2 = log_adaptive_gk15(sharp, 0.0, 1.0, {}, {1e-11, 50000});
  CHECK(res2.log_value == doctest::Approx(std::log((1.0 - std::exp(-1000.0)) / 1000.0))
                              .epsilon(1e-10));
}

TEST_CASE("null marginal closed form") {
  // n=5, S_y^2 = 1: logGamma(2) - 2 log pi - 0.5 log 5 - 2 log 5.
  Eigen::VectorXd y(5);
  y << 1.0, 2.0, 3.0, 1.5, 0.0;  // adjusted below to force S_y^2 = 1
  const double mean = y.mean();
  double ss = 0.0;
  for (int i = 0; i < 5; ++i) ss += (y(i) - mean) * (y(i) - mean);
  y = mean + (y.array() - mean) * std::sqrt(5.0 / ss);
  Eigen::MatrixXd x(5, 1);
  x << -2, -1, 0, 1, 2;
  const Dataset d(y, x);
  REQUIRE(d.s_y2() == doctest::Approx(1.0).epsilon(1e-12));
  const auto eval = log_marginal_null(d);
  const double expected = std::lgamma(2.0) - 2.0 * std::log(std::numbers::pi) -
                          0.5 * std::log(5.0) - 2.0 * std::log(5.0);
  CHECK(eval.log_m == doctest::Approx(expected).epsilon(1e-13));
  CHECK(eval.method == EvalMethod::kClosedForm);
}

TEST_CASE("null marginal equals the integral route forced through r2=0, p_alpha=0") {
  const Dataset d = simulated(40, 6, 12);
  const GMixturePrior prior = ScaledInvChiSq(1.0, 1600.0);
  const double via_integral =
      log_marginal_prefactor(d.n(), d.s_y2()) +
      log_bf_integral(d.n(), 0, 1.0, prior, 1e-10).log_value;
  CHECK(log_marginal_null(d).log_m == doctest::Approx(via_integral).epsilon(1e-10));
}

TEST_CASE("constant response is degenerate") {
  Eigen::VectorXd y = Eigen::VectorXd::Constant(6, 3.0);
  Eigen::MatrixXd x(6, 1);
  x << 1, 2, 3, 4, 5, 6;
  const Dataset d(y, x);
  CHECK_THROWS_AS(log_marginal_null(d), DegenerateResponse);
}

TEST_CASE("fixed-g marginal is closed form; the quadrature path rejects it") {
  const Dataset d = simulated(30, 5, 3);
  const ModelIndex alpha({1, 4});
  const GMixturePrior fixed = FixedG(900.0);
  CHECK_THROWS_AS(log_marginal_quadrature(d, alpha, fixed), UnsupportedOperation);

  const auto stats = fit_stats(d, alpha);
  const double expected = log_marginal_prefactor(d.n(), d.s_y2()) +
                          0.5 * (30 - 1 - 2) * std::log1p(900.0) -
                          0.5 * (30 - 1) * std::log1p(900.0 * stats.one_minus_r2);
  const auto eval = log_marginal(d, alpha, fixed);
  CHECK(eval.log_m == doctest::Approx(expected).epsilon(1e-12));
  CHECK(eval.method == EvalMethod::kClosedForm);
}

TEST_CASE("quadrature marginal matches the dense Simpson oracle") {
  const Dataset d = simulated(100, 12, 77);
  const ModelIndex alpha({2, 5, 7, 9, 11});
  const GMixturePrior prior = ScaledInvChiSq(12.0, 100.0 * 100.0);
  const auto eval = log_marginal_quadrature(d, alpha, prior, 1e-10);
  const auto stats = fit_stats(d, alpha);
  const double oracle = log_marginal_prefactor(d.n(), d.s_y2()) +
                        testing::simpson_log_bf(100, 5, stats.one_minus_r2, prior);
  CHECK(eval.log_m == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(eval.method == EvalMethod::kQuadrature);
  CHECK(eval.quad_abs_err <= 1e-9);
}

TEST_CASE("hyper-g at r2 = 0 cannot beat the null") {
  // Integrand (1+g)^{-p_alpha/2} pi(g) <= pi(g) pointwise.
  const GMixturePrior prior = BetaPrime(1.0, 0.5);  // hyper-g with a = 3
  const auto bf = log_bf_integral(60, 3, 1.0, prior, 1e-10);
  CHECK(bf.log_value < 0.0);
}

TEST_CASE("bayes factor equals marginal difference and is scale invariant") {
  const Dataset d = simulated(50, 8, 5);
  const ModelIndex alpha({1, 3, 8});
  const GMixturePrior prior = ScaledInvChiSq(8.0, 2500.0);

  const double bf = log_bayes_factor_vs_null(d, alpha, prior);
  const double diff = log_marginal(d, alpha, prior).log_m - log_marginal_null(d).log_m;
  CHECK(bf == doctest::Approx(diff).epsilon(1e-10));

  // y -> 2y: R^2 unchanged, the integral term identical.
  const Dataset scaled(2.0 * d.y(), d.x());
  CHECK(log_bayes_factor_vs_null(scaled, alpha, prior) == doctest::Approx(bf).epsilon(1e-9));
}

TEST_CASE("bayes factor increases in R^2 at fixed p_alpha") {
  const GMixturePrior prior = ScaledInvChiSq(1.0, 10000.0);
  double prev = -1e300;
  for (double r2 : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    const double bf = log_bf_integral(100, 4, 1.0 - r2, prior, 1e-10).log_value;
    CHECK(bf > prev);
    prev = bf;
  }
}

TEST_CASE("bayes factor diverges numerically as the fit saturates") {
  // nu = 1 with n = p_alpha + 7: the saturation exponent is (6-1)/2 = 2.5,
  // so at 1-R^2 = 1e-12 the factor passes e^50.
  const int p_alpha = 3;
  const int n = p_alpha + 7;
  const GMixturePrior prior = ScaledInvChiSq(1.0, static_cast<double>(n) * n);
  const double bf = log_bf_integral(n, p_alpha, 1e-12, prior, 1e-10).log_value;
  CHECK(bf > 50.0);
}

TEST_CASE("saturated fits raise a flagged signal instead of a number") {
  const GMixturePrior diverging = ScaledInvChiSq(1.0, 2500.0);
  try {
    log_bf_integral(50, 5, 1e-14, diverging, 1e-10);
    FAIL("expected SaturatedFit");
  } catch (const SaturatedFit& e) {
    CHECK(e.one_minus_r2() == doctest::Approx(1e-14));
    CHECK(e.limit_diverges());  // (n-1-p)/2 = 22 >= nu/2 = 0.5
  }
  const GMixturePrior finite_limit = ScaledInvChiSq(100.0, 2500.0);
  try {
    log_bf_integral(50, 5, 1e-14, finite_limit, 1e-10);
    FAIL("expected SaturatedFit");
  } catch (const SaturatedFit& e) {
    CHECK_FALSE(e.limit_diverges());  // tail index 50 > 22
  }
}

TEST_CASE("quadrature tolerance domain") {
  const GMixturePrior prior = ScaledInvChiSq(1.0, 2500.0);
  CHECK_THROWS_AS(log_bf_integral(50, 5, 0.5, prior, 1e-5), InvalidInput);
  CHECK_THROWS_AS(log_bf_integral(50, 5, 0.5, prior, 1e-13), InvalidInput);
}

TEST_CASE("approximation: null reduction, guard, and accuracy ordering") {
  const Dataset d = simulated(100, 10, 9);

  SUBCASE("p_alpha = 0 reduces exactly to the null marginal") {
    const auto eval = log_marginal_approx(d, ModelIndex::null_model(), 1.0, 10000.0);
    CHECK(eval.log_m == log_marginal_null(d).log_m);
  }
  SUBCASE("tau2 != n^2 is out of the derivation's regime") {
    CHECK_THROWS_AS(log_marginal_approx(d, ModelIndex({1}), 1.0, 9999.0), UnsupportedOperation);
  }
  SUBCASE("nu = p is closer to the quadrature value than nu = 1") {
    const ModelIndex alpha({1, 2, 3});
    const auto exact1 =
        log_marginal_quadrature(d, alpha, ScaledInvChiSq(1.0, 10000.0), 1e-10).log_m;
    const auto exactp =
        log_marginal_quadrature(d, alpha, ScaledInvChiSq(10.0, 10000.0), 1e-10).log_m;
    const double gap1 = std::abs(std::expm1(exact1 - log_marginal_approx(d, alpha, 1.0, 10000.0).log_m));
    const double gapp = std::abs(std::expm1(exactp - log_marginal_approx(d, alpha, 10.0, 10000.0).log_m));
    CHECK(gapp < gap1);
  }
}

TEST_CASE("the approximation gap shrinks with n at fixed b") {
  double prev_gap = 1e300;
  for (int n : {100, 200, 400}) {
    const int p = static_cast<int>(std::ceil(std::sqrt(n)));
    const TruthParams truth = make_snr_truth(p, 1.0, 42);
    const auto [d, spec] =
        realize_dataset(truth, n, ErrorDist::kNormal, ErrorCalibration::kDefault, 1000 + n);
    const ModelIndex alpha = truth.true_model;
    const double exact =
        log_marginal_quadrature(d, alpha, ScaledInvChiSq(1.0, static_cast<double>(n) * n), 1e-10)
            .log_m;
    const double approx =
        log_marginal_approx(d, alpha, 1.0, static_cast<double>(n) * n).log_m;
    const double gap = std::abs(std::expm1(exact - approx));
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("posterior probabilities") {
  const Dataset d = simulated(30, 4, 2);
  const auto m0 = log_marginal_null(d);
  const GMixturePrior prior = ScaledInvChiSq(4.0, 900.0);
  const auto m1 = log_marginal(d, ModelIndex({1}), prior);
  const auto m2 = log_marginal(d, ModelIndex({1, 2}), prior);

  SUBCASE("single model gets probability one") {
    const auto probs = posterior_probs({{ModelIndex({1}), m1}}, ModelPrior::uniform(), 4);
    CHECK(probs.at(ModelIndex({1})) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("equal marginals split evenly under the uniform prior") {
    auto m1_copy = m1;
    const auto probs = posterior_probs({{ModelIndex({1}), m1}, {ModelIndex({2}), m1_copy}},
                                       ModelPrior::uniform(), 4);
    CHECK(probs.at(ModelIndex({1})) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("three models match a long-double normalization oracle under bernoulli(1/2)") {
    const ModelPrior mp = ModelPrior::bernoulli(0.5);
    const auto probs = posterior_probs(
        {{ModelIndex::null_model(), m0}, {ModelIndex({1}), m1}, {ModelIndex({1, 2}), m2}}, mp, 2);
    // Oracle: direct normalization in extended precision.
    const long double w0 = expl(static_cast<long double>(m0.log_m) + 2.0L * logl(0.5L));
    const long double w1 = expl(static_cast<long double>(m1.log_m) + 2.0L * logl(0.5L));
    const long double w2 = expl(static_cast<long double>(m2.log_m) + 2.0L * logl(0.5L));
    const long double total = w0 + w1 + w2;
    CHECK(probs.at(ModelIndex::null_model()) ==
          doctest::Approx(static_cast<double>(w0 / total)).epsilon(1e-12));
    CHECK(probs.at(ModelIndex({1})) ==
          doctest::Approx(static_cast<double>(w1 / total)).epsilon(1e-12));
    CHECK(probs.at(ModelIndex({1, 2})) ==
          doctest::Approx(static_cast<double>(w2 / total)).epsilon(1e-12));
    double sum = 0.0;
    for (const auto& [model, prob] : probs) sum += prob;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("duplicate models are rejected") {
    auto m1_copy = m1;
    CHECK_THROWS_AS(
        posterior_probs({{ModelIndex({1}), m1}, {ModelIndex({1}), m1_copy}}, ModelPrior::uniform(), 4),
        InvalidInput);
  }
}

TEST_CASE("oracle equivalence across families on random instances") {
  Xoshiro256pp rng(2024);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = 30 + rng.uniform_int(0, 90);
    const int p = 4 + rng.uniform_int(0, 6);
    const Dataset d = simulated(n, p, 5000 + rep);
    const int pa = 1 + rng.uniform_int(0, 3);
    std::vector<int> idx = rng.subset(p, pa);
    for (int& j : idx) ++j;
    const ModelIndex alpha(idx);
    const auto stats = fit_stats(d, alpha);

    std::vector<GMixturePrior> priors = {
        ScaledInvChiSq(1.0, static_cast<double>(n) * n),
        ZellnerSiow(n),
        HyperGOverN(3.0, n),
        RobustPrior(0.5, 1.0, RhoRule::kInverseDimension, 0.0, n, pa),
    };
    for (const auto& prior : priors) {
      CAPTURE(rep);
      CAPTURE(describe(prior));
      const double mine = log_bf_integral(n, pa, stats.one_minus_r2, prior, 1e-10).log_value;
      const double oracle = testing::simpson_log_bf(n, pa, stats.one_minus_r2, prior, 300000);
      CHECK(mine == doctest::Approx(oracle).epsilon(5e-8));
    }
  }
}
