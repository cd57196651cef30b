#pragma once

#include <Eigen/Core>

#include "gmix/dataset.hpp"
#include "gmix/model_index.hpp"

namespace gmix {

/// Sufficient statistics of a submodel fit with intercept.
struct RegressionStats {
  double s_y2 = 0.0;       // ||y - ybar 1||^2 / n
  double r2 = 0.0;         // coefficient of determination, clamped into [0,1]
  double rss = 0.0;        // y'(I - P(alpha))y
  int p_alpha = 0;         // number of selected regressors
  int effective_rank = 0;  // numerical rank of [1 X_alpha]

  /// rss/(n s_y2) carried separately: exact even when r2 ~ 1.
  double one_minus_r2 = 1.0;
};

/// Least-squares statistics of the model [1 X_alpha] via a column-pivoted
/// orthogonal decomposition. Pivots below 1e-10 of the largest declare rank
/// deficiency, which is an error (never a fallback fit).
RegressionStats fit_stats(const Dataset& d, const ModelIndex& alpha);

/// mu'(I - P(alpha))mu, the sigma-free residual kernel of the projection
/// distance; the caller divides by 2 sigma^2.
double residual_quadratic(const Eigen::VectorXd& mu, const ModelIndex& alpha, const Dataset& d);

}  // namespace gmix
