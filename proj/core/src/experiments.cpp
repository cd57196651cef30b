#include "gmix/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "gmix/errors.hpp"
#include "gmix/regression.hpp"

namespace gmix {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  if (replicates < 1) bad.push_back("replicates");
  if (!(burn_in >= 0 && chain_length > burn_in)) bad.push_back("chain_length/burn_in");
  if (n_list.empty()) bad.push_back("n_list");
  for (int n : n_list)
    if (n < 3) bad.push_back("n_list");
  if (p_plus_1_list.empty()) bad.push_back("p_plus_1_list");
  for (int pp : p_plus_1_list)
    if (pp < 2) bad.push_back("p_plus_1_list");
  if (error_dists.empty()) bad.push_back("error_dist");
  if (priors.empty()) bad.push_back("priors");
  if (!(tol >= 1e-12 && tol <= 1e-6)) bad.push_back("tol");
  if (b_exponent && !(*b_exponent > 0.0 && *b_exponent < 1.0)) bad.push_back("b_exponent");
  for (int pp : p_plus_1_list)
    for (int n : n_list)
      if (pp - 1 >= n) bad.push_back("n_list/p_plus_1_list");
  if (!bad.empty()) {
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    std::string msg = "invalid experiment config; offending keys:";
    for (const auto& k : bad) msg += " " + k;
    throw ConfigError(msg, bad);
  }
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Table-1 convention: squared error against the ideal value 1.
double mse_vs_one(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += (x - 1.0) * (x - 1.0);
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct ReplicatedCell {
  ErrorDist dist;
  int p_plus_1;
  int n;
  PriorSpec prior;
  TruthParams truth;
  ModelIndex target;
  std::string target_name;
  std::uint64_t cell_seed;
};

ExperimentReport run_replicated(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string scheme_name = to_string(cfg.scheme);

  std::vector<ReplicatedCell> cells;
  for (ErrorDist dist : cfg.error_dists) {
    for (int pp : cfg.p_plus_1_list) {
      const int p = pp - 1;
      // One truth draw per (scheme, p), shared across n, error distribution
      // and prior so cells are comparable and trends in n are meaningful.
      const std::uint64_t truth_seed =
          derive_seed(cfg.base_seed, fnv1a64("truth|" + scheme_name + "|p=" + std::to_string(p)));
      const TruthParams truth = make_truth(p, cfg.scheme, truth_seed);
      for (int n : cfg.n_list) {
        for (const PriorSpec& prior : cfg.priors) {
          ReplicatedCell cell{dist, pp, n, prior, truth, ModelIndex(), "", 0};
          switch (cfg.scheme) {
            case Scheme::kScheme1:
              cell.target = ModelIndex::null_model();
              cell.target_name = "null";
              break;
            case Scheme::kScheme2:
              cell.target = truth.sparse_target;
              cell.target_name = "sparse-model";
              break;
            default:
              cell.target = truth.true_model;
              cell.target_name = "true-model";
              break;
          }
          cell.cell_seed = derive_seed(
              cfg.base_seed, fnv1a64(scheme_name + "|" + to_string(dist) + "|p+1=" +
                                     std::to_string(pp) + "|n=" + std::to_string(n) + "|" +
                                     prior.name()));
          cells.push_back(std::move(cell));
        }
      }
    }
  }

  const int r = cfg.replicates;
  std::vector<std::vector<double>> raw(cells.size(), std::vector<double>(r, 0.0));
  std::vector<std::vector<double>> omr(cells.size(), std::vector<double>(r, 1.0));

  const int tasks = static_cast<int>(cells.size()) * r;
  parallel_for(tasks, cfg.threads, [&](int t) {
    const int ci = t / r;
    const int rep = t % r;
    const ReplicatedCell& cell = cells[static_cast<std::size_t>(ci)];
    const std::uint64_t data_seed = derive_seed(cell.cell_seed, 2 * static_cast<std::uint64_t>(rep));
    const std::uint64_t chain_seed =
        derive_seed(cell.cell_seed, 2 * static_cast<std::uint64_t>(rep) + 1);
    auto [d, spec] = realize_dataset(cell.truth, cell.n, cell.dist, cfg.calibration, data_seed);
    SearchResult res;
    if (cfg.scheme == Scheme::kNested) {
      res = enumerate_nested(d, cell.prior, cfg.model_prior, {cfg.tol, 20});
    } else {
      res = gibbs_search(d, cell.prior, cfg.model_prior,
                         {cfg.chain_length, cfg.burn_in, chain_seed, cfg.tol});
    }
    const auto it = res.probs.find(cell.target);
    raw[static_cast<std::size_t>(ci)][static_cast<std::size_t>(rep)] =
        it == res.probs.end() ? 0.0 : it->second;
    omr[static_cast<std::size_t>(ci)][static_cast<std::size_t>(rep)] = res.min_one_minus_r2;
  });

  ExperimentReport report;
  report.scheme = scheme_name;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const ReplicatedCell& cell = cells[ci];
    ReportRow row;
    row.scheme = scheme_name;
    row.error_dist = to_string(cell.dist);
    row.prior = cell.prior.name();
    row.target = cell.target_name;
    row.calibration = to_string(cfg.calibration);
    row.n = cell.n;
    row.p_plus_1 = cell.p_plus_1;
    row.replicates = r;
    row.mean = mean_of(raw[ci]);
    row.mse = mse_vs_one(raw[ci]);
    row.min_one_minus_r2 = *std::min_element(omr[ci].begin(), omr[ci].end());
    row.cell_seed = cell.cell_seed;
    row.raw = raw[ci];
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace

ExperimentReport run_table1(const ExperimentConfig& cfg) {
  if (cfg.scheme != Scheme::kTable1)
    throw ConfigError("run_table1 requires scheme=table1", {"scheme"});
  return run_replicated(cfg);
}

ExperimentReport run_scheme(const ExperimentConfig& cfg) {
  if (cfg.scheme != Scheme::kScheme1 && cfg.scheme != Scheme::kScheme2)
    throw ConfigError("run_scheme requires scheme=scheme1 or scheme2", {"scheme"});
  return run_replicated(cfg);
}

ExperimentReport run_nested(const ExperimentConfig& cfg) {
  if (cfg.scheme != Scheme::kNested)
    throw ConfigError("run_nested requires scheme=nested", {"scheme"});
  return run_replicated(cfg);
}

ExperimentReport run_model_false(const ExperimentConfig& cfg, const MuBuilder& mu_builder) {
  if (cfg.scheme != Scheme::kModelFalse)
    throw ConfigError("run_model_false requires scheme=model-false", {"scheme"});
  cfg.validate();
  for (int pp : cfg.p_plus_1_list)
    if (pp - 1 > 14)
      throw ConfigError("model-false requires p <= 14 (exhaustive projection minimum)",
                        {"p_plus_1_list"});

  ExperimentReport report;
  report.scheme = to_string(cfg.scheme);
  const ErrorDist dist = cfg.error_dists.front();
  const PriorSpec prior = cfg.priors.front();
  const int r = cfg.replicates;

  for (int pp : cfg.p_plus_1_list) {
    const int p = pp - 1;
    for (int n : cfg.n_list) {
      const std::uint64_t cell_seed = derive_seed(
          cfg.base_seed, fnv1a64("model-false|" + to_string(dist) + "|p+1=" + std::to_string(pp) +
                                 "|n=" + std::to_string(n) + "|" + prior.name()));
      std::vector<double> ratios(static_cast<std::size_t>(r), 0.0);
      std::vector<double> omr(static_cast<std::size_t>(r), 1.0);
      parallel_for(r, cfg.threads, [&](int rep) {
        const ModelFalseData mf = generate_model_false(
            n, p, dist, derive_seed(cell_seed, static_cast<std::uint64_t>(rep)), mu_builder);
        const double two_sigma2 = 2.0 * mf.sigma * mf.sigma;
        const std::uint64_t count = std::uint64_t{1} << p;

        ModelScorer scorer(mf.d, prior, cfg.model_prior, cfg.tol);
        double best_score = -std::numeric_limits<double>::infinity();
        std::uint64_t best_mask = 0;
        ModelIndex best_model;
        std::vector<double> dn(count, 0.0);
        double dn_min = std::numeric_limits<double>::infinity();
        for (std::uint64_t mask = 0; mask < count; ++mask) {
          const ModelIndex alpha = ModelIndex::from_mask(mask);
          dn[mask] = residual_quadratic(mf.mu, alpha, mf.d) / two_sigma2;
          dn_min = std::min(dn_min, dn[mask]);
          const double score = scorer.log_score(mask);
          if (mask == 0 || ranks_above(score, alpha, best_score, best_model)) {
            best_score = score;
            best_mask = mask;
            best_model = alpha;
          }
        }
        const double mu_scale = mf.mu.squaredNorm() / two_sigma2;
        if (!(dn_min > 1e-10 * mu_scale))
          throw InvalidModelFalseDesign(
              "the generated mean lies inside a candidate span (min D_n ~ 0); "
              "the ratio diagnostic is undefined for model-true means");
        ratios[static_cast<std::size_t>(rep)] = dn[best_mask] / dn_min;
        omr[static_cast<std::size_t>(rep)] = scorer.min_one_minus_r2();
      });

      ReportRow row;
      row.scheme = report.scheme;
      row.error_dist = to_string(dist);
      row.prior = prior.name();
      row.target = "ratio";
      row.calibration = to_string(cfg.calibration);
      row.n = n;
      row.p_plus_1 = pp;
      row.replicates = r;
      row.mean = mean_of(ratios);
      row.mse = mse_vs_one(ratios);
      row.min_one_minus_r2 = *std::min_element(omr.begin(), omr.end());
      row.cell_seed = cell_seed;
      row.raw = ratios;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

InfoProfile info_consistency_profile(int n, int p_alpha, const GMixturePrior& prior,
                                     const std::string& name, double tol) {
  InfoProfile profile;
  profile.prior = name;
  profile.n = n;
  profile.p_alpha = p_alpha;
  for (int k = 1; k <= 6; ++k) {
    const double omr = std::pow(10.0, -2.0 * k);
    const double log_bf = log_bf_integral(n, p_alpha, omr, prior, tol).log_value;
    profile.points.push_back({omr, log_bf});
  }
  const std::size_t m = profile.points.size();
  profile.diverges = profile.points[m - 1].log_bf - profile.points[m - 2].log_bf >= 0.1;
  return profile;
}

namespace {

bool sics_diverges(int n, int p_alpha, double nu, double tol) {
  const ScaledInvChiSq prior(nu, static_cast<double>(n) * n);
  return info_consistency_profile(n, p_alpha, prior, "sics", tol).diverges;
}

int observed_threshold(int p_alpha, bool nu_is_p, double tol) {
  const int n_max = p_alpha + (nu_is_p ? p_alpha : 1) + 6;
  for (int n = p_alpha + 1; n <= n_max; ++n) {
    const double nu = nu_is_p ? static_cast<double>(p_alpha) : 1.0;
    if (sics_diverges(n, p_alpha, nu, tol)) return n;
  }
  return n_max + 1;
}

}  // namespace

InfoConsistencyReport run_info_consistency(int n, int p_alpha, SicsVariant nu_choice, double tol) {
  if (!(n > p_alpha)) throw InvalidInput("run_info_consistency requires n > p_alpha");
  InfoConsistencyReport report;
  report.p_alpha = p_alpha;

  const auto sics = [p_alpha](int nn, SicsVariant v) {
    const double nu = v == SicsVariant::kNu1 ? 1.0 : static_cast<double>(p_alpha);
    return ScaledInvChiSq(nu, static_cast<double>(nn) * nn);
  };
  const std::string main_name = nu_choice == SicsVariant::kNu1 ? "sics-nu1" : "sics-nup";
  report.profiles.push_back(
      info_consistency_profile(n, p_alpha, sics(n, nu_choice), main_name, tol));
  // Both nu choices at the boundary sample sizes, plus a fixed-g baseline.
  report.profiles.push_back(info_consistency_profile(p_alpha + 1, p_alpha,
                                                     sics(p_alpha + 1, SicsVariant::kNu1),
                                                     "sics-nu1", tol));
  report.profiles.push_back(info_consistency_profile(p_alpha + 1, p_alpha,
                                                     sics(p_alpha + 1, SicsVariant::kNuP),
                                                     "sics-nup", tol));
  report.profiles.push_back(info_consistency_profile(2 * p_alpha, p_alpha,
                                                     sics(2 * p_alpha, SicsVariant::kNuP),
                                                     "sics-nup", tol));
  report.profiles.push_back(info_consistency_profile(
      n, p_alpha, FixedG(static_cast<double>(n) * n), "fixed-g", tol));

  report.observed_threshold_nu1 = observed_threshold(p_alpha, false, tol);
  report.observed_threshold_nup = observed_threshold(p_alpha, true, tol);
  report.stated_threshold_nu1 = p_alpha + 1;
  report.stated_threshold_nup = 2 * p_alpha;
  return report;
}

ApproxStudyReport run_approx_study(double b, const std::vector<int>& n_list, SicsVariant nu_choice,
                                   std::uint64_t seed, const ApproxStudyOptions& opt) {
  if (!(b > 0.0 && b < 1.0)) throw InvalidInput("b must lie in (0,1)");
  if (n_list.empty()) throw InvalidInput("n_list must not be empty");

  ApproxStudyReport report;
  report.b = b;
  report.nu_choice = nu_choice;

  std::vector<std::vector<double>> gaps(n_list.size());
  for (std::size_t ni = 0; ni < n_list.size(); ++ni)
    gaps[ni].resize(static_cast<std::size_t>(opt.datasets_per_n * opt.models_per_dataset), 0.0);

  const int tasks = static_cast<int>(n_list.size()) * opt.datasets_per_n;
  parallel_for(tasks, opt.threads, [&](int t) {
    const std::size_t ni = static_cast<std::size_t>(t) / opt.datasets_per_n;
    const int ds = t % opt.datasets_per_n;
    const int n = n_list[ni];
    const int p = static_cast<int>(std::ceil(std::pow(n, b)));
    if (p >= n) throw InvalidInput("approx study requires ceil(n^b) < n");
    const double nu = nu_choice == SicsVariant::kNu1 ? 1.0 : static_cast<double>(p);
    const ScaledInvChiSq prior(nu, static_cast<double>(n) * n);

    const std::uint64_t ds_seed =
        derive_seed(seed, fnv1a64("approx|n=" + std::to_string(n) + "|ds=" + std::to_string(ds)));
    const TruthParams truth = make_snr_truth(p, opt.snr, derive_seed(ds_seed, 0));
    auto [d, spec] = realize_dataset(truth, n, ErrorDist::kNormal, ErrorCalibration::kDefault,
                                     derive_seed(ds_seed, 1));
    Xoshiro256pp rng(derive_seed(ds_seed, 2));

    for (int k = 0; k < opt.models_per_dataset; ++k) {
      // Models around the truth keep R^2 bounded away from 0 and 1, which is
      // the regime in which the decay rate in n is visible.
      ModelIndex alpha = truth.true_model;
      if (k > 0) {
        const int drop = rng.uniform_int(0, 1);
        if (drop == 1 && alpha.size() > 1) alpha = alpha.without(alpha.indices().front());
        const int extras = rng.uniform_int(0, 2);
        for (int e = 0; e < extras; ++e) {
          const int j = rng.uniform_int(1, p);
          alpha = alpha.with(j);
        }
      }
      const RegressionStats stats = fit_stats(d, alpha);
      const double lq =
          log_bf_integral(n, stats.p_alpha, stats.one_minus_r2, prior, opt.tol).log_value;
      const double lt = std::lgamma(0.5 * (nu + stats.p_alpha)) - std::lgamma(0.5 * nu) -
                        0.5 * stats.p_alpha * std::log(static_cast<double>(n) * n * nu / 2.0) -
                        0.5 * (n - 1) * std::log(stats.one_minus_r2);
      gaps[ni][static_cast<std::size_t>(ds * opt.models_per_dataset + k)] =
          std::abs(std::expm1(lq - lt));
    }
  });

  // Least-squares slope of log(median gap) against log(n).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    ApproxStudyRow row;
    row.n = n_list[ni];
    row.p = static_cast<int>(std::ceil(std::pow(n_list[ni], b)));
    row.median_gap = median_of(gaps[ni]);
    row.mean_gap = mean_of(gaps[ni]);
    report.rows.push_back(row);
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.median_gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(n_list.size());
  report.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return report;
}

}  // namespace gmix
