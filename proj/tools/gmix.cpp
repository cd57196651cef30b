// Command line harness: variable selection on CSV datasets and the bundled
// replication studies, with deterministic seeding and CSV reports.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmix/errors.hpp"
#include "gmix/experiments.hpp"
#include "gmix/io.hpp"
#include "gmix/marginal.hpp"
#include "gmix/model_space.hpp"
#include "gmix/priors.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out-dir", flags.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", flags.seed, "base seed override");
  cmd->add_option("--replicates", flags.replicates, "replicate count override");
  cmd->add_option("--threads", flags.threads, "worker thread count (0 = hardware)");
}

int env_threads() {
  if (const char* env = std::getenv("GMIX_THREADS")) return std::atoi(env);
  return -1;
}

gmix::ExperimentConfig resolve_config(const CommonFlags& flags,
                                      const gmix::ExperimentConfig& defaults) {
  gmix::ExperimentConfig cfg = defaults;
  if (!flags.config_path.empty()) cfg = gmix::load_experiment_config(flags.config_path, defaults);
  if (flags.seed) cfg.base_seed = *flags.seed;
  if (flags.replicates) cfg.replicates = *flags.replicates;
  if (flags.threads) cfg.threads = *flags.threads;
  if (const int t = env_threads(); t >= 0) cfg.threads = t;
  cfg.validate();
  return cfg;
}

void emit_report(const std::string& command, const gmix::ExperimentConfig& cfg,
                 const gmix::ExperimentReport& report, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const gmix::RunManifest manifest = gmix::make_manifest(command, cfg);
  const fs::path base = fs::path(out_dir);
  gmix::write_report_csv((base / (command + "_report.csv")).string(), report, manifest);
  gmix::write_raw_csv((base / (command + "_raw.csv")).string(), report, manifest);
  gmix::write_plot_csv((base / (command + "_plot.csv")).string(), report, manifest);
  gmix::write_manifest_json((base / (command + "_manifest.json")).string(), manifest, cfg);
  std::cout << command << ": " << report.rows.size() << " cells, config_hash "
            << manifest.config_hash << ", reports in " << out_dir << "\n";
  for (const auto& row : report.rows)
    std::cout << "  " << row.error_dist << " p+1=" << row.p_plus_1 << " n=" << row.n << " "
              << row.prior << ": mean=" << gmix::format_double(row.mean)
              << " mse=" << gmix::format_double(row.mse) << "\n";
}

int cmd_select(const std::string& data_path, const std::string& prior_text,
               const std::string& model_prior_text, const std::string& mode, long chain_length,
               long burn_in, std::uint64_t seed, double tol, int top_k) {
  const gmix::Dataset d = gmix::load_dataset(data_path);
  const gmix::PriorSpec prior = gmix::PriorSpec::parse(prior_text);
  gmix::ModelPrior mp = gmix::ModelPrior::uniform();
  if (model_prior_text != "uniform") {
    const std::string prefix = "bernoulli:";
    if (model_prior_text.rfind(prefix, 0) != 0)
      throw gmix::InvalidInput("model prior must be 'uniform' or 'bernoulli:q'");
    mp = gmix::ModelPrior::bernoulli(std::stod(model_prior_text.substr(prefix.size())));
  }
  // Reject constant responses up front; every marginal needs S_y^2 > 0.
  (void)gmix::log_marginal_null(d);

  gmix::SearchResult result;
  std::string how;
  const bool exhaustive = mode == "enumerate" || (mode == "auto" && d.p() <= 20);
  if (mode == "nested") {
    result = gmix::enumerate_nested(d, prior, mp, {tol, 64});
    how = "nested chain of " + std::to_string(d.p() + 1) + " models";
  } else if (exhaustive) {
    result = gmix::enumerate_all(d, prior, mp, {tol, 20});
    how = "exhaustive enumeration of " + std::to_string(result.visited) + " models";
  } else {
    result = gmix::gibbs_search(d, prior, mp, {chain_length, burn_in, seed, tol});
    how = "Gibbs chain of " + std::to_string(chain_length) + " sweeps (" +
          std::to_string(result.visited) + " models evaluated)";
  }

  std::vector<std::pair<gmix::ModelIndex, double>> ranked(result.probs.begin(),
                                                          result.probs.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });

  std::cout << "dataset: n=" << d.n() << " p=" << d.p() << "\n";
  std::cout << "prior: " << prior.name() << "; search: " << how << "\n";
  std::cout << "top model: " << result.top.to_string() << " (p_alpha=" << result.top.size()
            << ", posterior=" << gmix::format_double(result.probs.at(result.top)) << ")\n";
  std::cout << "rank,model,p_alpha,posterior\n";
  for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(top_k); ++i)
    std::cout << i + 1 << "," << ranked[i].first.to_string() << "," << ranked[i].first.size()
              << "," << gmix::format_double(ranked[i].second) << "\n";
  return kExitOk;
}

int cmd_priors_list() {
  std::cout << "family            parameters (defaults)                  notes\n"
            << "sics              nu=1, tau2=n^2                         interior mode at tau2*nu/(nu+2)\n"
            << "sics-nu1          nu=1, tau2=n^2                         flagship mixture\n"
            << "sics-nup          nu=p, tau2=n^2                         flagship mixture, strongest parsimony\n"
            << "zellner-siow      -                                      inverse-gamma(1/2, n/2)\n"
            << "hyper-g           a=3                                    J-shaped, mode at 0\n"
            << "hyper-g-n         a=3                                    hyper-g on g/n\n"
            << "generalized-g     b=0.25                                 beta-prime, shape depends on p_alpha\n"
            << "robust            a=0.5, b=1, rho=1/(1+p_alpha)          support g > rho(n+b)-b\n"
            << "beta-prime        gamma0, gamma1 (required)              generic second-kind beta\n"
            << "fixed-g           g=n^2                                  point mass; closed-form marginal\n"
            << "values accept numbers or the symbols n, p, n^2, p^2, max(n,p^2)\n"
            << "example: --prior sics:nu=p,tau2=n^2 or --prior fixed-g:g=max(n,p^2)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"g-prior mixture variable selection"};

  // select --------------------------------------------------------------------
  auto* select = app.add_subcommand("select", "variable selection on a CSV dataset");
  std::string data_path;
  std::string prior_text = "sics-nup";
  std::string model_prior_text = "uniform";
  std::string mode = "auto";
  long chain_length = 10000;
  long burn_in = 5000;
  std::uint64_t select_seed = 0;
  double tol = gmix::kDefaultQuadTol;
  int top_k = 10;
  select->add_option("--data", data_path, "CSV file: header row, y first, regressors after")
      ->required();
  select->add_option("--prior", prior_text, "prior spec")->capture_default_str();
  select->add_option("--model-prior", model_prior_text, "uniform or bernoulli:q")
      ->capture_default_str();
  select->add_option("--mode", mode, "auto | enumerate | nested | gibbs")
      ->check(CLI::IsMember({"auto", "enumerate", "nested", "gibbs"}))
      ->capture_default_str();
  select->add_option("--chain-length", chain_length)->capture_default_str();
  select->add_option("--burn-in", burn_in)->capture_default_str();
  select->add_option("--seed", select_seed)->capture_default_str();
  select->add_option("--tol", tol)->capture_default_str();
  select->add_option("--top", top_k, "rows in the ranking table")->capture_default_str();

  // experiment subcommands ------------------------------------------------------
  CommonFlags table1_flags, scheme1_flags, scheme2_flags, mf_flags;
  auto* table1 = app.add_subcommand("table1", "fixed-truth replication study");
  add_common(table1, table1_flags);
  auto* scheme1 = app.add_subcommand("scheme1", "null-model-true study");
  add_common(scheme1, scheme1_flags);
  auto* scheme2 = app.add_subcommand("scheme2", "sparse-truth study");
  add_common(scheme2, scheme2_flags);
  auto* model_false = app.add_subcommand("model-false", "projection-distance ratio study");
  add_common(model_false, mf_flags);

  // info-check ------------------------------------------------------------------
  auto* info = app.add_subcommand("info-check", "saturated-fit Bayes factor profiles");
  int info_n = 15;
  int info_p_alpha = 10;
  std::string info_nu = "1";
  std::string info_out = ".";
  info->add_option("--n", info_n)->capture_default_str();
  info->add_option("--p-alpha", info_p_alpha)->capture_default_str();
  info->add_option("--nu", info_nu, "1 or p")->check(CLI::IsMember({"1", "p"}))
      ->capture_default_str();
  info->add_option("--out-dir", info_out)->capture_default_str();

  // approx-study ------------------------------------------------------------------
  auto* approx = app.add_subcommand("approx-study", "closed-form approximation accuracy vs n");
  double approx_b = 0.5;
  std::vector<int> approx_n_list{100, 200, 400, 800};
  std::string approx_nu = "p";
  std::uint64_t approx_seed = 986960440;
  std::string approx_out = ".";
  int approx_threads = 0;
  approx->add_option("--b", approx_b, "growth exponent p = ceil(n^b)")->capture_default_str();
  approx->add_option("--n-list", approx_n_list)->capture_default_str();
  approx->add_option("--nu", approx_nu, "1 or p")->check(CLI::IsMember({"1", "p"}))
      ->capture_default_str();
  approx->add_option("--seed", approx_seed)->capture_default_str();
  approx->add_option("--threads", approx_threads)->capture_default_str();
  approx->add_option("--out-dir", approx_out)->capture_default_str();

  auto* priors_list = app.add_subcommand("priors-list", "known prior families and defaults");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (select->parsed())
      return cmd_select(data_path, prior_text, model_prior_text, mode, chain_length, burn_in,
                        select_seed, tol, top_k);
    if (table1->parsed()) {
      gmix::ExperimentConfig defaults;
      defaults.scheme = gmix::Scheme::kTable1;
      const auto cfg = resolve_config(table1_flags, defaults);
      if (cfg.scheme != gmix::Scheme::kTable1)
        throw gmix::ConfigError("the table1 subcommand requires scheme=table1", {"scheme"});
      emit_report("table1", cfg, gmix::run_table1(cfg), table1_flags.out_dir);
      return kExitOk;
    }
    if (scheme1->parsed()) {
      gmix::ExperimentConfig defaults;
      defaults.scheme = gmix::Scheme::kScheme1;
      const auto cfg = resolve_config(scheme1_flags, defaults);
      if (cfg.scheme != gmix::Scheme::kScheme1)
        throw gmix::ConfigError("the scheme1 subcommand requires scheme=scheme1", {"scheme"});
      emit_report("scheme1", cfg, gmix::run_scheme(cfg), scheme1_flags.out_dir);
      return kExitOk;
    }
    if (scheme2->parsed()) {
      gmix::ExperimentConfig defaults;
      defaults.scheme = gmix::Scheme::kScheme2;
      const auto cfg = resolve_config(scheme2_flags, defaults);
      if (cfg.scheme != gmix::Scheme::kScheme2)
        throw gmix::ConfigError("the scheme2 subcommand requires scheme=scheme2", {"scheme"});
      emit_report("scheme2", cfg, gmix::run_scheme(cfg), scheme2_flags.out_dir);
      return kExitOk;
    }
    if (model_false->parsed()) {
      gmix::ExperimentConfig defaults;
      defaults.scheme = gmix::Scheme::kModelFalse;
      defaults.n_list = {100, 200, 400};
      defaults.p_plus_1_list = {11};
      defaults.replicates = 50;
      defaults.priors = {gmix::PriorSpec::parse("sics-nup")};
      const auto cfg = resolve_config(mf_flags, defaults);
      if (cfg.scheme != gmix::Scheme::kModelFalse)
        throw gmix::ConfigError("the model-false subcommand requires scheme=model-false",
                                {"scheme"});
      emit_report("model-false", cfg, gmix::run_model_false(cfg), mf_flags.out_dir);
      return kExitOk;
    }
    if (info->parsed()) {
      const auto nu = info_nu == "1" ? gmix::SicsVariant::kNu1 : gmix::SicsVariant::kNuP;
      const auto report = gmix::run_info_consistency(info_n, info_p_alpha, nu);
      fs::create_directories(info_out);
      gmix::ExperimentConfig cfg;
      cfg.base_seed = 0;
      const auto manifest = gmix::make_manifest("info-check", cfg);
      gmix::write_info_report_csv((fs::path(info_out) / "info_check_report.csv").string(), report,
                                  manifest);
      std::cout << "info-check: p_alpha=" << report.p_alpha << "\n";
      for (const auto& profile : report.profiles)
        std::cout << "  " << profile.prior << " n=" << profile.n << ": "
                  << (profile.diverges ? "diverges" : "plateaus") << " (log BF at 1-R^2=1e-12: "
                  << gmix::format_double(profile.points.back().log_bf) << ")\n";
      std::cout << "  observed divergence thresholds: nu=1 at n=" << report.observed_threshold_nu1
                << " (stated " << report.stated_threshold_nu1 << "), nu=p at n="
                << report.observed_threshold_nup << " (stated " << report.stated_threshold_nup
                << ")\n";
      return kExitOk;
    }
    if (approx->parsed()) {
      const auto nu = approx_nu == "1" ? gmix::SicsVariant::kNu1 : gmix::SicsVariant::kNuP;
      gmix::ApproxStudyOptions opt;
      opt.threads = approx_threads;
      if (const int t = env_threads(); t >= 0) opt.threads = t;
      const auto report = gmix::run_approx_study(approx_b, approx_n_list, nu, approx_seed, opt);
      fs::create_directories(approx_out);
      gmix::ExperimentConfig cfg;
      cfg.base_seed = approx_seed;
      const auto manifest = gmix::make_manifest("approx-study", cfg);
      gmix::write_approx_report_csv((fs::path(approx_out) / "approx_study_report.csv").string(),
                                    report, manifest);
      std::cout << "approx-study: b=" << approx_b << " nu=" << approx_nu << "\n";
      for (const auto& row : report.rows)
        std::cout << "  n=" << row.n << " p=" << row.p
                  << " median|m/m~-1|=" << gmix::format_double(row.median_gap) << "\n";
      std::cout << "  fitted exponent: " << gmix::format_double(report.fitted_exponent) << "\n";
      return kExitOk;
    }
    if (priors_list->parsed()) return cmd_priors_list();
  } catch (const gmix::DegenerateResponse& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const gmix::DegenerateDesign& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const gmix::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gmix::InvalidRegime& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gmix::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gmix::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
