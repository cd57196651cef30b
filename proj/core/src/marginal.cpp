#include "gmix/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "gmix/errors.hpp"
#include "gmix/quadrature.hpp"

namespace gmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Saturated-limit divergence test: as R^2 -> 1 the integral tends to
// int (1+g)^{(n-1-p)/2} pi(g) dg, infinite iff (n-1-p)/2 >= tail index.
bool limit_diverges(int n, int p_alpha, const GMixturePrior& prior) {
  return 0.5 * (n - 1 - p_alpha) >= tail_index(prior);
}

// Panel seeds for the u = g/(1+g) map, parameterized by s = 1-u so that the
// g -> infinity end (s -> 0) keeps full floating-point resolution. Break
// points are placed on a geometric ladder of g covering both the prior mass
// scale and the likelihood peak near g ~ 1/(1-R^2).
std::vector<double> panel_breaks(double one_minus_r2, const GMixturePrior& prior, double s_hi) {
  const double hint = std::max(1.0, scale_hint(prior));
  int k_hi = static_cast<int>(std::ceil(std::log10(hint))) + 6;
  if (one_minus_r2 > 0.0)
    k_hi = std::max(k_hi, static_cast<int>(std::ceil(-std::log10(one_minus_r2))) + 3);
  k_hi = std::clamp(k_hi, 10, 60);
  std::vector<double> breaks;
  breaks.reserve(static_cast<std::size_t>(k_hi) + 9);
  for (int k = -8; k <= k_hi; ++k) {
    const double g = std::pow(10.0, k);
    const double s = 1.0 / (1.0 + g);
    if (s > 0.0 && s < s_hi) breaks.push_back(s);
  }
  return breaks;
}

}  // namespace

double log_marginal_prefactor(int n, double s_y2) {
  if (!(s_y2 > 0.0)) throw DegenerateResponse("response has zero sample variance");
  const double half = 0.5 * (n - 1);
  return std::lgamma(half) - half * std::log(std::numbers::pi) - 0.5 * std::log(n) -
         half * std::log(n * s_y2);
}

BfIntegral log_bf_integral(int n, int p_alpha, double one_minus_r2, const GMixturePrior& prior,
                           double tol) {
  if (n < 3) throw InvalidInput("log_bf_integral requires n >= 3");
  if (p_alpha < 0 || p_alpha >= n) throw InvalidInput("log_bf_integral requires 0 <= p_alpha < n");
  if (!(tol >= 1e-12 && tol <= 1e-6))
    throw InvalidInput("quadrature tolerance must lie in [1e-12, 1e-6]");
  if (!(one_minus_r2 >= 0.0)) throw InvalidInput("one_minus_r2 must be >= 0");
  const double omr = std::min(one_minus_r2, 1.0);

  if (const auto* fixed = std::get_if<FixedG>(&prior)) {
    // Degenerate mixture: the integral collapses to the integrand at g.
    BfIntegral out;
    out.log_value = 0.5 * (n - 1 - p_alpha) * std::log1p(fixed->g) -
                    0.5 * (n - 1) * std::log1p(fixed->g * omr);
    return out;
  }

  if (p_alpha == 0) return {};  // integrand reduces to pi(g); integral is 1

  if (omr < kSaturationFloor) {
    throw SaturatedFit("1-R^2 = " + std::to_string(omr) +
                           " is below the saturation floor; the mixture integral " +
                           (limit_diverges(n, p_alpha, prior) ? "diverges" : "stays finite") +
                           " in the R^2 -> 1 limit",
                       omr, limit_diverges(n, p_alpha, prior));
  }

  const double g0 = support_lower_bound(prior);
  const double s_hi = g0 > 0.0 ? 1.0 / (1.0 + g0) : 1.0;
  const double half_np = 0.5 * (n - 1 - p_alpha);
  const double half_n1 = 0.5 * (n - 1);

  // Integrand in s = 1 - u = 1/(1+g); dg = ds / s^2.
  const auto log_f = [&](double s) -> double {
    if (s <= 0.0) return kNegInf;
    double g;
    double log1pg;
    if (s >= 1.0) {
      g = 0.0;
      log1pg = 0.0;
    } else {
      g = (1.0 - s) / s;
      log1pg = -std::log(s);
    }
    const double lp = log_density(prior, g);
    if (lp == kNegInf) return kNegInf;
    return half_np * log1pg - half_n1 * std::log1p(g * omr) + lp - 2.0 * std::log(s);
  };

  const std::vector<double> breaks = panel_breaks(omr, prior, s_hi);
  const LogQuadResult q =
      log_adaptive_gk15(log_f, 0.0, s_hi, std::span<const double>(breaks), {tol, 50000});
  return {q.log_value, q.rel_err, q.evaluations};
}

MarginalEvaluation log_marginal_null(const Dataset& d) {
  MarginalEvaluation eval;
  eval.log_m = log_marginal_prefactor(d.n(), d.s_y2());
  eval.method = EvalMethod::kClosedForm;
  eval.r2 = 0.0;
  eval.p_alpha = 0;
  return eval;
}

MarginalEvaluation log_marginal_quadrature(const Dataset& d, const ModelIndex& alpha,
                                           const GMixturePrior& prior, double tol) {
  if (alpha.is_null())
    throw InvalidInput("log_marginal_quadrature requires a non-null model; use log_marginal_null");
  if (std::holds_alternative<FixedG>(prior))
    throw UnsupportedOperation("the quadrature path serves continuous mixtures; FixedG has a closed form");
  const RegressionStats stats = fit_stats(d, alpha);
  const double prefactor = log_marginal_prefactor(d.n(), d.s_y2());
  const BfIntegral bf = log_bf_integral(d.n(), stats.p_alpha, stats.one_minus_r2, prior, tol);
  MarginalEvaluation eval;
  eval.log_m = prefactor + bf.log_value;
  eval.method = EvalMethod::kQuadrature;
  eval.r2 = stats.r2;
  eval.p_alpha = stats.p_alpha;
  eval.quad_abs_err = bf.rel_err;
  return eval;
}

MarginalEvaluation log_marginal_approx(const Dataset& d, const ModelIndex& alpha, double nu,
                                       double tau2) {
  if (!(nu > 0.0)) throw InvalidInput("nu must be > 0");
  const double n2 = static_cast<double>(d.n()) * static_cast<double>(d.n());
  if (std::abs(tau2 - n2) > 1e-9 * n2)
    throw UnsupportedOperation("the closed-form approximation is derived for tau2 = n^2 (got tau2 = " +
                               std::to_string(tau2) + ", n^2 = " + std::to_string(n2) + ")");
  if (alpha.is_null()) return log_marginal_null(d);

  const RegressionStats stats = fit_stats(d, alpha);
  if (stats.one_minus_r2 < kSaturationFloor)
    throw SaturatedFit("1-R^2 below the saturation floor; the approximation requires 1-R^2 > 0",
                       stats.one_minus_r2, true);
  const int n = d.n();
  MarginalEvaluation eval;
  eval.log_m = log_marginal_prefactor(n, d.s_y2()) + std::lgamma(0.5 * (nu + stats.p_alpha)) -
               std::lgamma(0.5 * nu) - 0.5 * stats.p_alpha * std::log(n2 * nu / 2.0) -
               0.5 * (n - 1) * std::log(stats.one_minus_r2);
  eval.method = EvalMethod::kApproximation;
  eval.r2 = stats.r2;
  eval.p_alpha = stats.p_alpha;
  return eval;
}

MarginalEvaluation log_marginal(const Dataset& d, const ModelIndex& alpha,
                                const GMixturePrior& prior, double tol) {
  if (alpha.is_null()) return log_marginal_null(d);
  if (std::holds_alternative<FixedG>(prior)) {
    const RegressionStats stats = fit_stats(d, alpha);
    const BfIntegral bf = log_bf_integral(d.n(), stats.p_alpha, stats.one_minus_r2, prior, tol);
    MarginalEvaluation eval;
    eval.log_m = log_marginal_prefactor(d.n(), d.s_y2()) + bf.log_value;
    eval.method = EvalMethod::kClosedForm;
    eval.r2 = stats.r2;
    eval.p_alpha = stats.p_alpha;
    return eval;
  }
  return log_marginal_quadrature(d, alpha, prior, tol);
}

double log_bayes_factor_vs_null(const Dataset& d, const ModelIndex& alpha,
                                const GMixturePrior& prior, double tol) {
  if (alpha.is_null()) throw InvalidInput("the Bayes factor against the null requires a non-null model");
  const RegressionStats stats = fit_stats(d, alpha);
  return log_bf_integral(d.n(), stats.p_alpha, stats.one_minus_r2, prior, tol).log_value;
}

ModelPrior ModelPrior::bernoulli(double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("bernoulli inclusion probability must be in (0,1)");
  return {Kind::kBernoulli, q};
}

double log_model_prior_mass(const ModelPrior& mp, int p_alpha, int p) {
  if (mp.kind == ModelPrior::Kind::kUniform) return 0.0;
  return p_alpha * std::log(mp.q) + (p - p_alpha) * std::log1p(-mp.q);
}

std::map<ModelIndex, double> posterior_probs(
    const std::vector<std::pair<ModelIndex, MarginalEvaluation>>& evals, const ModelPrior& mp,
    int p) {
  if (evals.empty()) throw InvalidInput("posterior_probs requires at least one model");
  std::set<ModelIndex> seen;
  double lse = kNegInf;
  std::vector<double> scores;
  scores.reserve(evals.size());
  for (const auto& [alpha, eval] : evals) {
    if (!seen.insert(alpha).second)
      throw InvalidInput("duplicate model " + alpha.to_string() + " in posterior_probs");
    const double score = log_model_prior_mass(mp, alpha.size(), p) + eval.log_m;
    scores.push_back(score);
    lse = log_add_exp(lse, score);
  }
  std::map<ModelIndex, double> probs;
  for (std::size_t i = 0; i < evals.size(); ++i)
    probs[evals[i].first] = std::exp(scores[i] - lse);
  return probs;
}

}  // namespace gmix
