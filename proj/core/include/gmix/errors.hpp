#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gmix {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, unsorted indices, bad ranges.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A (n, p) combination outside the supported regime (p >= n).
class InvalidRegime : public Error {
 public:
  using Error::Error;
};

/// Configuration document failed validation; carries the offending keys.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg, std::vector<std::string> keys = {})
      : Error(msg), offending_keys_(std::move(keys)) {}
  const std::vector<std::string>& offending_keys() const { return offending_keys_; }

 private:
  std::vector<std::string> offending_keys_;
};

/// Numerically rank-deficient design matrix [1 X_alpha]; carries the columns
/// that failed pivoting (0 denotes the intercept, j >= 1 the j-th regressor).
class DegenerateDesign : public Error {
 public:
  DegenerateDesign(const std::string& msg, std::vector<int> deficient)
      : Error(msg), deficient_columns_(std::move(deficient)) {}
  const std::vector<int>& deficient_columns() const { return deficient_columns_; }

 private:
  std::vector<int> deficient_columns_;
};

/// Constant response vector (zero sample variance).
class DegenerateResponse : public Error {
 public:
  using Error::Error;
};

/// 1 - R^2 fell below the saturation floor: the mixture integral may diverge,
/// so no finite number is reported. `limit_diverges` tells whether the
/// R^2 -> 1 limit of the integral is infinite for the given prior tail.
class SaturatedFit : public Error {
 public:
  SaturatedFit(const std::string& msg, double one_minus_r2, bool limit_diverges)
      : Error(msg), one_minus_r2_(one_minus_r2), limit_diverges_(limit_diverges) {}
  double one_minus_r2() const { return one_minus_r2_; }
  bool limit_diverges() const { return limit_diverges_; }

 private:
  double one_minus_r2_;
  bool limit_diverges_;
};

/// Adaptive refinement hit its panel budget; carries the partial estimate.
class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& msg, double partial_log_value, double relative_error)
      : Error(msg), partial_log_value_(partial_log_value), relative_error_(relative_error) {}
  double partial_log_value() const { return partial_log_value_; }
  double relative_error() const { return relative_error_; }

 private:
  double partial_log_value_;
  double relative_error_;
};

/// Operation not defined for the given variant (e.g. density of a point mass).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration requested on a model space that is too large.
class SpaceTooLarge : public Error {
 public:
  using Error::Error;
};

/// The model-false generator produced a mean inside the candidate span.
class InvalidModelFalseDesign : public Error {
 public:
  using Error::Error;
};

}  // namespace gmix
