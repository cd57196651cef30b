#include "gmix/dataset.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "gmix/errors.hpp"

namespace gmix {

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& x_raw) {
  if (x_raw.rows() < 2) throw InvalidInput("center_columns requires at least 2 rows");
  Eigen::MatrixXd x = x_raw;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double scale = 1.0 + x.col(j).cwiseAbs().maxCoeff();
    // Pass through columns that are centered up to roundoff so reloading a
    // saved centered matrix reproduces it bit for bit.
    if (std::abs(mean) > 1e-12 * scale) x.col(j).array() -= mean;
  }
  return x;
}

Dataset::Dataset(Eigen::VectorXd y, const Eigen::MatrixXd& x_raw) : y_(std::move(y)) {
  const auto n = y_.size();
  if (x_raw.rows() != n)
    throw InvalidInput("y has " + std::to_string(n) + " rows but X has " +
                       std::to_string(x_raw.rows()));
  if (n < 3) throw InvalidInput("need n >= 3 observations");
  if (x_raw.cols() < 1) throw InvalidInput("need p >= 1 regressors");
  if (x_raw.cols() >= n)
    throw InvalidRegime("p = " + std::to_string(x_raw.cols()) + " regressors with n = " +
                        std::to_string(n) + " observations; p < n is required");
  if (!y_.allFinite() || !x_raw.allFinite())
    throw InvalidInput("dataset contains non-finite values");
  x_ = center_columns(x_raw);
  y_mean_ = y_.mean();
  s_y2_ = (y_.array() - y_mean_).square().sum() / static_cast<double>(n);
}

Eigen::MatrixXd Dataset::submatrix(const ModelIndex& alpha) const {
  if (alpha.max_index() > p())
    throw InvalidInput("model index " + std::to_string(alpha.max_index()) +
                       " exceeds p = " + std::to_string(p()));
  Eigen::MatrixXd sub(n(), alpha.size());
  int c = 0;
  for (int j : alpha.indices()) sub.col(c++) = x_.col(j - 1);
  return sub;
}

}  // namespace gmix
