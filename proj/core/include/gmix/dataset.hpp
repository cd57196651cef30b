#pragma once

#include <Eigen/Core>

#include "gmix/model_index.hpp"

namespace gmix {

/// Subtract each column's mean. Requires at least 2 rows. Columns whose mean
/// is already negligible relative to the column scale are passed through
/// unchanged, so centering is an exact no-op on already-centered data.
Eigen::MatrixXd center_columns(const Eigen::MatrixXd& x_raw);

/// Response vector plus centered design matrix. Immutable after construction;
/// safe for concurrent reads.
class Dataset {
 public:
  /// Centers the columns of `x_raw`. Requires n >= 3, 1 <= p < n.
  Dataset(Eigen::VectorXd y, const Eigen::MatrixXd& x_raw);

  int n() const { return static_cast<int>(y_.size()); }
  int p() const { return static_cast<int>(x_.cols()); }
  const Eigen::VectorXd& y() const { return y_; }
  /// Centered design matrix.
  const Eigen::MatrixXd& x() const { return x_; }
  double y_mean() const { return y_mean_; }
  /// S_y^2 = ||y - ybar 1||^2 / n.
  double s_y2() const { return s_y2_; }
  bool centered() const { return true; }

  /// The n x p(alpha) submatrix with the columns selected by `alpha`.
  Eigen::MatrixXd submatrix(const ModelIndex& alpha) const;

 private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd x_;
  double y_mean_ = 0.0;
  double s_y2_ = 0.0;
};

}  // namespace gmix
