// Test-only reference implementations, deliberately independent of the
// library's evaluation paths: a dense composite-Simpson integrator for the
// mixture integral, a normal-equations fit with an explicit inverse, and a
// dense projector residual.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "gmix/dataset.hpp"
#include "gmix/model_index.hpp"
#include "gmix/priors.hpp"
#include "gmix/regression.hpp"

namespace gmix::testing {

// Composite Simpson over u = g/(1+g) on (0,1), parameterized by s = 1-u.
// The partition follows a fixed geometric ladder of g so all mass scales are
// resolved; ~total_nodes function evaluations, no adaptivity.
inline double simpson_log_bf(int n, int p_alpha, double one_minus_r2, const GMixturePrior& prior,
                             long total_nodes = 1'000'000) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const double omr = one_minus_r2;
  const double half_np = 0.5 * (n - 1 - p_alpha);
  const double half_n1 = 0.5 * (n - 1);

  const auto log_f = [&](double s) -> double {
    if (s <= 0.0) return neg_inf;
    double g, log1pg;
    if (s >= 1.0) {
      g = 0.0;
      log1pg = 0.0;
    } else {
      g = (1.0 - s) / s;
      log1pg = -std::log(s);
    }
    const double lp = log_density(prior, g);
    if (lp == neg_inf) return neg_inf;
    return half_np * log1pg - half_n1 * std::log1p(g * omr) + lp - 2.0 * std::log(s);
  };

  const double g0 = support_lower_bound(prior);
  const double s_hi = g0 > 0.0 ? 1.0 / (1.0 + g0) : 1.0;

  std::vector<double> edges;
  edges.push_back(s_hi);
  for (int k = -13; k <= 17; ++k) {
    const double s = 1.0 / (1.0 + std::pow(10.0, k));
    if (s < s_hi && s > 1e-18) edges.push_back(s);
  }
  edges.push_back(1e-18);
  // edges descend in s; integrate each [edges[i+1], edges[i]] panel.
  const long per_panel = std::max<long>(8, total_nodes / static_cast<long>(edges.size() - 1));
  const long m = per_panel % 2 == 0 ? per_panel : per_panel + 1;  // Simpson needs even count

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>((m + 1) * static_cast<long>(edges.size() - 1)));
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double hi = edges[e];
    const double lo = edges[e + 1];
    const double h = (hi - lo) / static_cast<double>(m);
    const double log_h3 = std::log(h / 3.0);
    for (long i = 0; i <= m; ++i) {
      const double s = lo + h * static_cast<double>(i);
      const double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      const double v = log_f(s);
      if (v != neg_inf) terms.push_back(log_h3 + std::log(w) + v);
    }
  }
  if (terms.empty()) return neg_inf;
  double mmax = neg_inf;
  for (double t : terms) mmax = std::max(mmax, t);
  long double acc = 0.0L;
  for (double t : terms) acc += std::exp(static_cast<long double>(t - mmax));
  return mmax + static_cast<double>(std::log(acc));
}

// Brute-force least squares through the explicit inverse of Z'Z.
struct NormalEquationsFit {
  double rss = 0.0;
  double r2 = 0.0;
};

inline NormalEquationsFit normal_equations_fit(const Dataset& d, const ModelIndex& alpha) {
  const int n = d.n();
  Eigen::MatrixXd z(n, alpha.size() + 1);
  z.col(0).setOnes();
  int c = 1;
  for (int j : alpha.indices()) z.col(c++) = d.x().col(j - 1);
  const Eigen::MatrixXd ztz_inv = (z.transpose() * z).inverse();
  const Eigen::VectorXd coef = ztz_inv * (z.transpose() * d.y());
  const Eigen::VectorXd resid = d.y() - z * coef;
  NormalEquationsFit fit;
  fit.rss = resid.squaredNorm();
  fit.r2 = 1.0 - fit.rss / (n * d.s_y2());
  return fit;
}

// mu'(I - P)mu with the projector formed densely.
inline double dense_projector_residual(const Eigen::VectorXd& mu, const Dataset& d,
                                       const ModelIndex& alpha) {
  const int n = d.n();
  Eigen::MatrixXd z(n, alpha.size() + 1);
  z.col(0).setOnes();
  int c = 1;
  for (int j : alpha.indices()) z.col(c++) = d.x().col(j - 1);
  const Eigen::MatrixXd proj = z * (z.transpose() * z).inverse() * z.transpose();
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  return (mu.transpose() * (ident - proj) * mu)(0, 0);
}

}  // namespace gmix::testing
