#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "gmix/dataset.hpp"
#include "gmix/model_index.hpp"
#include "gmix/rng.hpp"

namespace gmix {

enum class ErrorDist { kNormal, kLaplace, kT3 };

/// How sigma is read for the non-normal error draws. kDefault keeps the
/// Laplace draw at variance sigma^2 (scale sigma/sqrt(2)) and the t3 draw at
/// scale sigma (variance 3 sigma^2); kScale/kVariance apply one reading to
/// both families.
enum class ErrorCalibration { kDefault, kScale, kVariance };

enum class Scheme { kTable1, kScheme1, kScheme2, kModelFalse, kNested };

std::string to_string(ErrorDist dist);
std::string to_string(ErrorCalibration calibration);
std::string to_string(Scheme scheme);
ErrorDist parse_error_dist(const std::string& text);
ErrorCalibration parse_calibration(const std::string& text);
Scheme parse_scheme(const std::string& text);

/// The cell-level truth, drawn once and held fixed across replicates: the
/// data-generating model, its coefficients, the noise level, and the
/// regressor means. alpha_s is the sparse selection target where the scheme
/// defines one.
struct TruthParams {
  int p = 0;
  Scheme scheme = Scheme::kTable1;
  ModelIndex true_model;       // empty for the null-true scheme
  double beta0 = 0.0;
  Eigen::VectorXd beta;        // coefficients of true_model's columns, in index order
  double sigma = 1.0;
  Eigen::VectorXd xi;          // regressor means, length p
  ModelIndex sparse_target;    // {1,2,3,4} for scheme2, empty otherwise
};

/// Draw the truth for a scheme:
///  - table1 / nested: xi = random permutation of (0.2, ..., 0.2p);
///    p(true) = floor(p/2) columns (random subset for table1, the prefix
///    {1..floor(p/2)} for nested); coefficients and intercept drawn i.i.d.
///    from the alternating grid {(-1)^i 0.2 i : i = 1..p}; sigma = 1.
///  - scheme1: null model true, beta0 = 5.
///  - scheme2: true model {1..15} with beta0=1, beta_1..4 = 2,3,4,5, eleven
///    coefficients of magnitude in (0.0005, 0.008), sparse target {1,2,3,4}.
TruthParams make_truth(int p, Scheme scheme, std::uint64_t seed);

/// Per-replicate realized truth: the mean vector recomputed from the parts
/// against the centered design of this replicate.
struct TrueModelSpec {
  ModelIndex alpha_c;
  double beta0 = 0.0;
  Eigen::VectorXd beta;
  double sigma = 1.0;
  Eigen::VectorXd xi;
  Eigen::VectorXd mu;  // beta0 1 + X_c(alpha_c) beta, length n
};

/// Draw one dataset under the fixed truth: columns x_j ~ N(xi_j, 1) centered,
/// errors per the distribution and calibration, y = mu + e.
std::pair<Dataset, TrueModelSpec> realize_dataset(const TruthParams& truth, int n, ErrorDist dist,
                                                  ErrorCalibration calibration,
                                                  std::uint64_t seed);

/// Convenience composition: truth and realization from one seed
/// (truth stream = derive_seed(seed, 0), realization = derive_seed(seed, 1)).
std::pair<Dataset, TrueModelSpec> generate_dataset(int n, int p, Scheme scheme, ErrorDist dist,
                                                   std::uint64_t seed);

/// One error vector with Var/scale calibrated per the rules above.
Eigen::VectorXd draw_errors(int n, double sigma, ErrorDist dist, ErrorCalibration calibration,
                            Xoshiro256pp& rng);

using MuBuilder = std::function<Eigen::VectorXd(const Eigen::MatrixXd& x_centered, double beta0)>;

/// Default mean for the model-false experiments: elementwise
/// beta0 + 2 exp(x_1) + x_2^2 over the first two centered regressors.
Eigen::VectorXd nonlinear_mean(const Eigen::MatrixXd& x_centered, double beta0);

struct ModelFalseData {
  Dataset d;
  Eigen::VectorXd mu;
  double sigma = 1.0;
};

/// Dataset whose mean escapes the span of every candidate model. The span
/// check itself lives in the experiment runner (it needs the projections).
ModelFalseData generate_model_false(int n, int p, ErrorDist dist, std::uint64_t seed,
                                    const MuBuilder& mu_builder = nonlinear_mean);

/// Fixed-signal truth for the approximation-accuracy study: coefficients
/// +-sigma sqrt(snr/p(alpha_c)) on a random floor(p/2)-subset, so the
/// signal-to-noise ratio does not drift with n or p.
TruthParams make_snr_truth(int p, double snr, std::uint64_t seed);

}  // namespace gmix
