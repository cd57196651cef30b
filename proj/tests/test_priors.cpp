#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "gmix/errors.hpp"
#include "gmix/priors.hpp"
#include "oracles.hpp"

using namespace gmix;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Normalization check: the p_alpha = 0 mixture integral equals
// int pi(g) dg, evaluated by the dense Simpson oracle.
double prior_mass(const GMixturePrior& prior) {
  return std::exp(testing::simpson_log_bf(20, 0, 1.0, prior, 400000));
}

}  // namespace

TEST_CASE("scaled inverse chi-square density: direct substitution") {
  const ScaledInvChiSq prior(1.0, 4.0);
  const double expected = std::log(std::sqrt(2.0) / std::tgamma(0.5)) - 1.0 - 1.5 * std::log(2.0);
  CHECK(log_density(prior, 2.0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("beta-prime density: direct substitution") {
  const BetaPrime prior(1.0, 1.0);
  CHECK(log_density(prior, 1.0) == doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("robust prior truncates below g0") {
  const RobustPrior prior(0.5, 1.0, RhoRule::kConstant, 0.25, 20, 3);
  const double g0 = 21.0 / 4.0 - 1.0;
  CHECK(prior.g0() == doctest::Approx(g0));
  CHECK(log_density(prior, g0 - 0.5) == -kInf);
  CHECK(log_density(prior, 1.0) == -kInf);
  CHECK(std::isfinite(log_density(prior, g0 + 0.5)));

  // Same bound through the model-dependent rho rule.
  const RobustPrior by_rule(0.5, 1.0, RhoRule::kInverseDimension, 0.0, 20, 3);
  CHECK(by_rule.g0() == doctest::Approx(g0));
}

TEST_CASE("point mass has no density") {
  const GMixturePrior prior = FixedG(100.0);
  CHECK_THROWS_AS(log_density(prior, 1.0), UnsupportedOperation);
}

TEST_CASE("hyperparameter domains are enforced at construction") {
  CHECK_THROWS_AS(ScaledInvChiSq(0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(ScaledInvChiSq(1.0, -1.0), InvalidInput);
  CHECK_THROWS_AS(HyperG(2.0), InvalidInput);
  CHECK_THROWS_AS(GeneralizedG(0.5, 100, 5), InvalidInput);
  CHECK_THROWS_AS(BetaPrime(0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(FixedG(0.0), InvalidInput);
  // rho <= B/(B+n) would push the support at or below zero
  CHECK_THROWS_AS(RobustPrior(0.5, 1.0, RhoRule::kConstant, 1.0 / 22.0, 20, 3), InvalidInput);
}

TEST_CASE("modes") {
  SUBCASE("sics interior mode at tau2 nu/(nu+2)") {
    const Mode m = mode(GMixturePrior(ScaledInvChiSq(1.0, 100.0 * 100.0)));
    CHECK(m.kind == Mode::Kind::kInterior);
    CHECK(m.location == doctest::Approx(10000.0 / 3.0).epsilon(1e-14));

    const Mode m2 = mode(GMixturePrior(ScaledInvChiSq(2.0, 100.0)));
    CHECK(m2.location == doctest::Approx(50.0).epsilon(1e-14));
  }
  SUBCASE("hyper-g is J-shaped with boundary mode at 0") {
    const Mode m = mode(GMixturePrior(HyperG(3.0)));
    CHECK(m.kind == Mode::Kind::kBoundary);
    CHECK(m.location == 0.0);
  }
  SUBCASE("the sics mode maximizes the density locally") {
    const GMixturePrior prior = ScaledInvChiSq(3.0, 2500.0);
    const Mode m = mode(prior);
    const double at_mode = log_density(prior, m.location);
    CHECK(at_mode >= log_density(prior, m.location * 1.001));
    CHECK(at_mode >= log_density(prior, m.location * 0.999));
  }
  SUBCASE("robust mode sits at the truncation point") {
    const RobustPrior prior(0.5, 1.0, RhoRule::kInverseDimension, 0.0, 50, 4);
    const Mode m = mode(GMixturePrior(prior));
    CHECK(m.kind == Mode::Kind::kBoundary);
    CHECK(m.location == doctest::Approx(prior.g0()));
  }
}

TEST_CASE("make_sics_prior presets") {
  const auto p1 = make_sics_prior(50, 29, SicsVariant::kNu1);
  const auto& s1 = std::get<ScaledInvChiSq>(p1);
  CHECK(s1.nu == 1.0);
  CHECK(s1.tau2 == 2500.0);

  const auto p2 = make_sics_prior(150, 49, SicsVariant::kNuP);
  const auto& s2 = std::get<ScaledInvChiSq>(p2);
  CHECK(s2.nu == 49.0);
  CHECK(s2.tau2 == 22500.0);

  CHECK_THROWS_AS(make_sics_prior(10, 10, SicsVariant::kNu1), InvalidRegime);
}

TEST_CASE("every continuous family integrates to one") {
  const int n = 100;
  const int p = 10;
  const int p_alpha = 5;
  const std::vector<GMixturePrior> family = {
      ScaledInvChiSq(1.0, static_cast<double>(n) * n),
      ScaledInvChiSq(static_cast<double>(p), static_cast<double>(n) * n),
      BetaPrime(2.0, 2.0),
      ZellnerSiow(n),
      HyperG(3.0),
      HyperGOverN(3.0, n),
      GeneralizedG(0.25, n, p_alpha),
      RobustPrior(0.5, 1.0, RhoRule::kInverseDimension, 0.0, n, p_alpha),
  };
  for (const auto& prior : family) {
    CAPTURE(describe(prior));
    CHECK(prior_mass(prior) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("sics equals the matching inverse-gamma pointwise") {
  const double nu = 3.0;
  const double tau2 = 400.0;
  const ScaledInvChiSq prior(nu, tau2);
  const double shape = nu / 2.0;
  const double scale = tau2 * nu / 2.0;
  for (double g : {0.5, 3.0, 40.0, 700.0, 1e5}) {
    const double ig = shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(g) -
                      scale / g;
    CHECK(log_density(prior, g) == doctest::Approx(ig).epsilon(1e-12));
  }
}

TEST_CASE("zellner-siow equals inverse-gamma(1/2, n/2) and sics(nu=1, tau2=n)") {
  const int n = 37;
  const ZellnerSiow zs(n);
  const ScaledInvChiSq sics(1.0, static_cast<double>(n));
  for (double g : {0.2, 5.0, 100.0, 3000.0}) {
    const double ig = 0.5 * std::log(n / 2.0) - std::lgamma(0.5) - 1.5 * std::log(g) -
                      0.5 * n / g;
    CHECK(log_density(GMixturePrior(zs), g) == doctest::Approx(ig).epsilon(1e-12));
    CHECK(log_density(GMixturePrior(zs), g) ==
          doctest::Approx(log_density(GMixturePrior(sics), g)).epsilon(1e-12));
  }
}

TEST_CASE("hyper-g matches its beta-prime form") {
  const double a = 3.0;
  const HyperG hg(a);
  const BetaPrime bp(1.0, a / 2.0 - 1.0);
  for (double g : {0.1, 1.0, 10.0, 1e4})
    CHECK(log_density(GMixturePrior(hg), g) ==
          doctest::Approx(log_density(GMixturePrior(bp), g)).epsilon(1e-12));
}

TEST_CASE("tail indices drive the saturation divergence rule") {
  CHECK(tail_index(ScaledInvChiSq(1.0, 100.0)) == doctest::Approx(0.5));
  CHECK(tail_index(ScaledInvChiSq(8.0, 100.0)) == doctest::Approx(4.0));
  CHECK(tail_index(ZellnerSiow(50)) == doctest::Approx(0.5));
  CHECK(tail_index(HyperG(3.0)) == doctest::Approx(0.5));
  CHECK(tail_index(RobustPrior(0.5, 1.0, RhoRule::kInverseDimension, 0.0, 50, 4)) ==
        doctest::Approx(0.5));
  CHECK(tail_index(FixedG(10.0)) == kInf);
}

TEST_CASE("prior specs resolve symbolic hyperparameters") {
  const PriorSpec spec = PriorSpec::parse("sics:nu=p,tau2=n^2");
  const auto prior = spec.instantiate(50, 29, 3);
  const auto& s = std::get<ScaledInvChiSq>(prior);
  CHECK(s.nu == 29.0);
  CHECK(s.tau2 == 2500.0);

  const PriorSpec fixed = PriorSpec::parse("fixed-g:g=max(n,p^2)");
  CHECK(std::get<FixedG>(fixed.instantiate(50, 29, 3)).g == doctest::Approx(841.0));
  CHECK(std::get<FixedG>(fixed.instantiate(2000, 29, 3)).g == doctest::Approx(2000.0));

  const PriorSpec robust = PriorSpec::parse("robust");
  const auto& r = std::get<RobustPrior>(robust.instantiate(20, 10, 3));
  CHECK(r.rho() == doctest::Approx(0.25));

  const PriorSpec robust_const = PriorSpec::parse("robust:rho=0.5");
  CHECK(std::get<RobustPrior>(robust_const.instantiate(20, 10, 3)).rho() == doctest::Approx(0.5));

  CHECK_THROWS_AS(PriorSpec::parse("no-such-family"), InvalidInput);
  CHECK_THROWS_AS(PriorSpec::parse("beta-prime"), InvalidInput);
  CHECK_THROWS_AS(PriorSpec::parse("sics:nu=q"), InvalidInput);

  CHECK(PriorSpec::default_competitors().size() == 6);
}
