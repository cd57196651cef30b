#include "gmix/simulation.hpp"

#include <cmath>
#include <vector>

#include "gmix/errors.hpp"

namespace gmix {

std::string to_string(ErrorDist dist) {
  switch (dist) {
    case ErrorDist::kNormal: return "normal";
    case ErrorDist::kLaplace: return "laplace";
    case ErrorDist::kT3: return "t3";
  }
  return "?";
}

std::string to_string(ErrorCalibration calibration) {
  switch (calibration) {
    case ErrorCalibration::kDefault: return "default";
    case ErrorCalibration::kScale: return "scale";
    case ErrorCalibration::kVariance: return "variance";
  }
  return "?";
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kTable1: return "table1";
    case Scheme::kScheme1: return "scheme1";
    case Scheme::kScheme2: return "scheme2";
    case Scheme::kModelFalse: return "model-false";
    case Scheme::kNested: return "nested";
  }
  return "?";
}

ErrorDist parse_error_dist(const std::string& text) {
  if (text == "normal") return ErrorDist::kNormal;
  if (text == "laplace") return ErrorDist::kLaplace;
  if (text == "t3") return ErrorDist::kT3;
  throw InvalidInput("unknown error distribution '" + text + "' (normal, laplace, t3)");
}

ErrorCalibration parse_calibration(const std::string& text) {
  if (text == "default") return ErrorCalibration::kDefault;
  if (text == "scale") return ErrorCalibration::kScale;
  if (text == "variance") return ErrorCalibration::kVariance;
  throw InvalidInput("unknown calibration '" + text + "' (default, scale, variance)");
}

Scheme parse_scheme(const std::string& text) {
  if (text == "table1") return Scheme::kTable1;
  if (text == "scheme1") return Scheme::kScheme1;
  if (text == "scheme2") return Scheme::kScheme2;
  if (text == "model-false" || text == "model_false") return Scheme::kModelFalse;
  if (text == "nested") return Scheme::kNested;
  throw InvalidInput("unknown scheme '" + text + "'");
}

namespace {

Eigen::VectorXd draw_xi(int p, Xoshiro256pp& rng) {
  Eigen::VectorXd xi(p);
  const std::vector<int> perm = rng.permutation(p);
  for (int i = 0; i < p; ++i) xi(i) = 0.2 * (perm[static_cast<std::size_t>(i)] + 1);
  return xi;
}

// The alternating-sign coefficient grid {(-1)^i 0.2 i : i = 1..p}.
double grid_value(int i) { return (i % 2 == 0 ? 1.0 : -1.0) * 0.2 * i; }

double draw_grid_coefficient(int p, Xoshiro256pp& rng) {
  return grid_value(rng.uniform_int(1, p));
}

}  // namespace

TruthParams make_truth(int p, Scheme scheme, std::uint64_t seed) {
  if (p < 1) throw InvalidInput("make_truth requires p >= 1");
  Xoshiro256pp rng(seed);
  TruthParams truth;
  truth.p = p;
  truth.scheme = scheme;
  truth.xi = draw_xi(p, rng);
  truth.sigma = 1.0;

  switch (scheme) {
    case Scheme::kTable1:
    case Scheme::kNested: {
      const int pc = p / 2;
      if (pc < 1) throw InvalidInput("table1/nested truth requires p >= 2");
      std::vector<int> cols;
      if (scheme == Scheme::kTable1) {
        cols = rng.subset(p, pc);
        for (int& c : cols) ++c;  // 1-based
      } else {
        for (int j = 1; j <= pc; ++j) cols.push_back(j);
      }
      truth.true_model = ModelIndex(cols);
      truth.beta0 = draw_grid_coefficient(p, rng);
      truth.beta.resize(pc);
      for (int i = 0; i < pc; ++i) truth.beta(i) = draw_grid_coefficient(p, rng);
      break;
    }
    case Scheme::kScheme1: {
      truth.true_model = ModelIndex::null_model();
      truth.beta0 = 5.0;
      truth.beta.resize(0);
      break;
    }
    case Scheme::kScheme2: {
      if (p < 15) throw InvalidInput("scheme2 requires p >= 15");
      std::vector<int> cols;
      for (int j = 1; j <= 15; ++j) cols.push_back(j);
      truth.true_model = ModelIndex(cols);
      truth.beta0 = 1.0;
      truth.beta.resize(15);
      for (int i = 0; i < 4; ++i) truth.beta(i) = i + 2.0;  // 2, 3, 4, 5
      for (int i = 4; i < 15; ++i) {
        const double mag = rng.uniform(0.0005, 0.008);
        truth.beta(i) = rng.uniform01() < 0.5 ? -mag : mag;
      }
      truth.sparse_target = ModelIndex({1, 2, 3, 4});
      break;
    }
    case Scheme::kModelFalse:
      throw InvalidInput("model-false data has no linear truth; use generate_model_false");
  }
  return truth;
}

Eigen::VectorXd draw_errors(int n, double sigma, ErrorDist dist, ErrorCalibration calibration,
                            Xoshiro256pp& rng) {
  Eigen::VectorXd e(n);
  switch (dist) {
    case ErrorDist::kNormal:
      for (int i = 0; i < n; ++i) e(i) = rng.normal(0.0, sigma);
      break;
    case ErrorDist::kLaplace: {
      const double scale =
          calibration == ErrorCalibration::kScale ? sigma : sigma / std::sqrt(2.0);
      for (int i = 0; i < n; ++i) e(i) = rng.laplace(scale);
      break;
    }
    case ErrorDist::kT3: {
      const double scale =
          calibration == ErrorCalibration::kVariance ? sigma / std::sqrt(3.0) : sigma;
      for (int i = 0; i < n; ++i) e(i) = scale * rng.student_t3();
      break;
    }
  }
  return e;
}

std::pair<Dataset, TrueModelSpec> realize_dataset(const TruthParams& truth, int n, ErrorDist dist,
                                                  ErrorCalibration calibration,
                                                  std::uint64_t seed) {
  const int p = truth.p;
  if (n <= p) throw InvalidRegime("realize_dataset requires n > p");
  Xoshiro256pp rng(seed);

  Eigen::MatrixXd x_raw(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) x_raw(i, j) = rng.normal(truth.xi(j), 1.0);
  const Eigen::MatrixXd x = center_columns(x_raw);

  Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, truth.beta0);
  int c = 0;
  for (int j : truth.true_model.indices()) mu += truth.beta(c++) * x.col(j - 1);

  const Eigen::VectorXd e = draw_errors(n, truth.sigma, dist, calibration, rng);
  Dataset d(mu + e, x);

  TrueModelSpec spec;
  spec.alpha_c = truth.true_model;
  spec.beta0 = truth.beta0;
  spec.beta = truth.beta;
  spec.sigma = truth.sigma;
  spec.xi = truth.xi;
  spec.mu = std::move(mu);
  return {std::move(d), std::move(spec)};
}

std::pair<Dataset, TrueModelSpec> generate_dataset(int n, int p, Scheme scheme, ErrorDist dist,
                                                   std::uint64_t seed) {
  const TruthParams truth = make_truth(p, scheme, derive_seed(seed, 0));
  return realize_dataset(truth, n, dist, ErrorCalibration::kDefault, derive_seed(seed, 1));
}

Eigen::VectorXd nonlinear_mean(const Eigen::MatrixXd& x_centered, double beta0) {
  if (x_centered.cols() < 2) throw InvalidInput("nonlinear_mean requires p >= 2");
  return (beta0 + 2.0 * x_centered.col(0).array().exp() + x_centered.col(1).array().square())
      .matrix();
}

ModelFalseData generate_model_false(int n, int p, ErrorDist dist, std::uint64_t seed,
                                    const MuBuilder& mu_builder) {
  if (p < 2) throw InvalidInput("generate_model_false requires p >= 2");
  if (n <= p) throw InvalidRegime("generate_model_false requires n > p");
  Xoshiro256pp rng(seed);
  const Eigen::VectorXd xi = draw_xi(p, rng);
  Eigen::MatrixXd x_raw(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) x_raw(i, j) = rng.normal(xi(j), 1.0);
  const Eigen::MatrixXd x = center_columns(x_raw);

  const double sigma = 1.0;
  Eigen::VectorXd mu = mu_builder(x, 1.0);
  if (mu.size() != n) throw InvalidInput("mu builder returned a vector of wrong length");
  const Eigen::VectorXd e = draw_errors(n, sigma, dist, ErrorCalibration::kDefault, rng);
  return {Dataset(mu + e, x), std::move(mu), sigma};
}

TruthParams make_snr_truth(int p, double snr, std::uint64_t seed) {
  if (p < 2) throw InvalidInput("make_snr_truth requires p >= 2");
  if (!(snr > 0.0)) throw InvalidInput("snr must be > 0");
  Xoshiro256pp rng(seed);
  TruthParams truth;
  truth.p = p;
  truth.scheme = Scheme::kTable1;
  truth.xi = Eigen::VectorXd::Zero(p);
  truth.sigma = 1.0;
  const int pc = p / 2;
  std::vector<int> cols = rng.subset(p, pc);
  for (int& c : cols) ++c;
  truth.true_model = ModelIndex(cols);
  truth.beta0 = 1.0;
  truth.beta.resize(pc);
  const double mag = truth.sigma * std::sqrt(snr / pc);
  for (int i = 0; i < pc; ++i) truth.beta(i) = rng.uniform01() < 0.5 ? -mag : mag;
  return truth;
}

}  // namespace gmix
