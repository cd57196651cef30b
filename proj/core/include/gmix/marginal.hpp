#pragma once

#include <map>
#include <utility>
#include <vector>

#include "gmix/dataset.hpp"
#include "gmix/model_index.hpp"
#include "gmix/priors.hpp"
#include "gmix/regression.hpp"

namespace gmix {

inline constexpr double kDefaultQuadTol = 1e-10;
/// Below this 1-R^2 a fit is flagged saturated instead of being evaluated.
inline constexpr double kSaturationFloor = 1e-13;

enum class EvalMethod { kQuadrature, kApproximation, kClosedForm };

struct MarginalEvaluation {
  double log_m = 0.0;
  EvalMethod method = EvalMethod::kClosedForm;
  double r2 = 0.0;
  int p_alpha = 0;
  double quad_abs_err = 0.0;  // log-scale error bound; 0 for exact routes
};

/// log of Gamma((n-1)/2) pi^{-(n-1)/2} n^{-1/2} (n S_y^2)^{-(n-1)/2}, the
/// model-independent factor of every marginal (equals the null marginal).
double log_marginal_prefactor(int n, double s_y2);

/// The g-integral of the Bayes factor against the null model:
/// log int (1+g)^{(n-1-p_alpha)/2} [1+g(1-R^2)]^{-(n-1)/2} pi(g) dg.
/// Closed form for FixedG, adaptive log-space quadrature otherwise (the
/// integral is mapped through u = g/(1+g) onto a bounded interval).
/// p_alpha = 0 returns exactly 0 for any proper prior.
struct BfIntegral {
  double log_value = 0.0;
  double rel_err = 0.0;
  long evaluations = 0;
};
BfIntegral log_bf_integral(int n, int p_alpha, double one_minus_r2, const GMixturePrior& prior,
                           double tol = kDefaultQuadTol);

/// Intercept-only marginal; closed form, exact for any proper mixture.
MarginalEvaluation log_marginal_null(const Dataset& d);

/// Exact (to `tol` on the log scale) marginal of a non-null model under a
/// continuous mixture. Rejects FixedG.
MarginalEvaluation log_marginal_quadrature(const Dataset& d, const ModelIndex& alpha,
                                           const GMixturePrior& prior,
                                           double tol = kDefaultQuadTol);

/// Closed-form approximation of the ScaledInvChiSq marginal, valid for
/// tau2 = n^2:
///   log m~ = prefactor + logGamma((nu+p_a)/2) - logGamma(nu/2)
///            - (p_a/2) log(n^2 nu/2) - ((n-1)/2) log(1-R^2).
MarginalEvaluation log_marginal_approx(const Dataset& d, const ModelIndex& alpha, double nu,
                                       double tau2);

/// Dispatch: null -> closed form, FixedG -> closed form, else quadrature.
MarginalEvaluation log_marginal(const Dataset& d, const ModelIndex& alpha,
                                const GMixturePrior& prior, double tol = kDefaultQuadTol);

/// log m_alpha - log m_null; the S_y^2 prefactors cancel exactly.
double log_bayes_factor_vs_null(const Dataset& d, const ModelIndex& alpha,
                                const GMixturePrior& prior, double tol = kDefaultQuadTol);

struct ModelPrior {
  enum class Kind { kUniform, kBernoulli };
  Kind kind = Kind::kUniform;
  double q = 0.5;

  static ModelPrior uniform() { return {Kind::kUniform, 0.5}; }
  static ModelPrior bernoulli(double q);
};

/// log p(M_alpha) up to a model-independent constant: 0 for uniform,
/// p_alpha log q + (p - p_alpha) log(1-q) for Bernoulli.
double log_model_prior_mass(const ModelPrior& mp, int p_alpha, int p);

/// Posterior probabilities over the supplied models, normalized by
/// log-sum-exp. Models must be distinct.
std::map<ModelIndex, double> posterior_probs(
    const std::vector<std::pair<ModelIndex, MarginalEvaluation>>& evals, const ModelPrior& mp,
    int p);

}  // namespace gmix
