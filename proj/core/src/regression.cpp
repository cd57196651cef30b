#include "gmix/regression.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <string>
#include <vector>

#include "gmix/errors.hpp"

namespace gmix {

namespace {

constexpr double kRankThreshold = 1e-10;

Eigen::MatrixXd build_z(const Dataset& d, const ModelIndex& alpha) {
  Eigen::MatrixXd z(d.n(), alpha.size() + 1);
  z.col(0).setOnes();
  int c = 1;
  for (int j : alpha.indices()) z.col(c++) = d.x().col(j - 1);
  return z;
}

// Decomposes Z = [1 X_alpha] and returns the squared norm of the residual of
// v after projecting onto the column space. Throws on rank deficiency.
double projected_residual_sq(const Dataset& d, const ModelIndex& alpha, const Eigen::VectorXd& v,
                             int* rank_out) {
  if (alpha.max_index() > d.p())
    throw InvalidInput("model index " + std::to_string(alpha.max_index()) +
                       " exceeds p = " + std::to_string(d.p()));
  const Eigen::MatrixXd z = build_z(d, alpha);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
  qr.setThreshold(kRankThreshold);
  const int rank = static_cast<int>(qr.rank());
  const int k = static_cast<int>(z.cols());
  if (rank < k) {
    // Columns beyond the numerical rank in pivot order, reported in the
    // caller's numbering: 0 = intercept, j >= 1 = regressor j.
    std::vector<int> deficient;
    const auto& perm = qr.colsPermutation().indices();
    for (int i = rank; i < k; ++i) {
      const int zcol = perm(i);
      deficient.push_back(zcol == 0 ? 0 : alpha.indices()[static_cast<std::size_t>(zcol - 1)]);
    }
    std::sort(deficient.begin(), deficient.end());
    std::string msg = "rank-deficient design for model " + alpha.to_string() + ": rank " +
                      std::to_string(rank) + " < " + std::to_string(k);
    throw DegenerateDesign(msg, std::move(deficient));
  }
  if (rank_out != nullptr) *rank_out = rank;
  Eigen::VectorXd qtv = qr.householderQ().transpose() * v;
  return qtv.tail(d.n() - rank).squaredNorm();
}

}  // namespace

RegressionStats fit_stats(const Dataset& d, const ModelIndex& alpha) {
  RegressionStats stats;
  stats.s_y2 = d.s_y2();
  stats.p_alpha = alpha.size();
  const double n_s_y2 = static_cast<double>(d.n()) * d.s_y2();

  if (alpha.is_null()) {
    stats.r2 = 0.0;
    stats.one_minus_r2 = 1.0;
    stats.rss = n_s_y2;
    stats.effective_rank = 1;
    return stats;
  }

  stats.rss = projected_residual_sq(d, alpha, d.y(), &stats.effective_rank);
  if (n_s_y2 > 0.0) {
    stats.one_minus_r2 = std::clamp(stats.rss / n_s_y2, 0.0, 1.0);
  } else {
    stats.one_minus_r2 = 1.0;  // constant response: define R^2 = 0
  }
  stats.r2 = 1.0 - stats.one_minus_r2;
  return stats;
}

double residual_quadratic(const Eigen::VectorXd& mu, const ModelIndex& alpha, const Dataset& d) {
  if (mu.size() != d.n())
    throw InvalidInput("mu has length " + std::to_string(mu.size()) + ", expected n = " +
                       std::to_string(d.n()));
  return projected_residual_sq(d, alpha, mu, nullptr);
}

}  // namespace gmix
