#include "gmix/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "gmix/errors.hpp"

namespace gmix {

namespace {

using nlohmann::json;

#ifndef GMIX_VERSION_STRING
#define GMIX_VERSION_STRING "0.0.0"
#endif

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_strict_double(const std::string& text, int row, int col) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || begin == end)
    throw InvalidInput("non-numeric cell '" + text + "' at row " + std::to_string(row) +
                       ", column " + std::to_string(col));
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("failed to format double");
  return std::string(buf.data(), ptr);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open dataset file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("dataset file '" + path + "' is empty");
  const std::size_t columns = split_csv_line(line).size();
  if (columns < 2) throw InvalidInput("dataset needs a response column and at least one regressor");

  std::vector<std::vector<double>> rows;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != columns)
      throw InvalidInput("ragged row " + std::to_string(row_number) + ": expected " +
                         std::to_string(columns) + " cells, got " + std::to_string(cells.size()));
    std::vector<double> values(columns);
    for (std::size_t c = 0; c < columns; ++c)
      values[c] = parse_strict_double(cells[c], row_number, static_cast<int>(c) + 1);
    rows.push_back(std::move(values));
  }

  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(columns) - 1;
  if (n < 3) throw InvalidInput("dataset needs at least 3 rows");
  if (p >= n)
    throw InvalidRegime("dataset has p = " + std::to_string(p) + " regressors and only n = " +
                        std::to_string(n) + " rows; p < n is required");
  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    y(i) = rows[static_cast<std::size_t>(i)][0];
    for (int j = 0; j < p; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) + 1];
  }
  return Dataset(std::move(y), x);
}

void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write dataset file '" + path + "'");
  out << "y";
  for (int j = 1; j <= d.p(); ++j) out << ",x" << j;
  out << "\n";
  for (int i = 0; i < d.n(); ++i) {
    out << format_double(d.y()(i));
    for (int j = 0; j < d.p(); ++j) out << "," << format_double(d.x()(i, j));
    out << "\n";
  }
}

std::string library_version() { return std::string("gmix ") + GMIX_VERSION_STRING; }

namespace {

json priors_to_json(const std::vector<PriorSpec>& priors) {
  json arr = json::array();
  for (const auto& p : priors) arr.push_back(p.name());
  return arr;
}

}  // namespace

std::string resolved_config_json(const ExperimentConfig& cfg) {
  json j;
  j["scheme"] = to_string(cfg.scheme);
  j["n_list"] = cfg.n_list;
  j["p_plus_1_list"] = cfg.p_plus_1_list;
  json dists = json::array();
  for (ErrorDist d : cfg.error_dists) dists.push_back(to_string(d));
  j["error_dist"] = dists;
  j["priors"] = priors_to_json(cfg.priors);
  j["model_prior"] =
      cfg.model_prior.kind == ModelPrior::Kind::kUniform
          ? json("uniform")
          : json("bernoulli:" + format_double(cfg.model_prior.q));
  j["replicates"] = cfg.replicates;
  j["chain_length"] = cfg.chain_length;
  j["burn_in"] = cfg.burn_in;
  j["base_seed"] = cfg.base_seed;
  if (cfg.b_exponent) j["b_exponent"] = *cfg.b_exponent;
  if (cfg.s_exponent) j["s_exponent"] = *cfg.s_exponent;
  j["calibration"] = to_string(cfg.calibration);
  j["tol"] = cfg.tol;
  // threads deliberately excluded: the report is thread-count invariant.
  return j.dump();
}

std::string config_digest(const std::string& canonical_json) {
  const std::uint64_t h = fnv1a64(canonical_json);
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

RunManifest make_manifest(const std::string& command, const ExperimentConfig& cfg) {
  RunManifest m;
  m.command = command;
  m.config_hash = config_digest(resolved_config_json(cfg));
  m.base_seed = cfg.base_seed;
  m.library_version = library_version();
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  m.timestamp = buf;
  return m;
}

namespace {

ModelPrior parse_model_prior(const std::string& text) {
  if (text == "uniform") return ModelPrior::uniform();
  const std::string prefix = "bernoulli:";
  if (text.rfind(prefix, 0) == 0) {
    const double q = std::stod(text.substr(prefix.size()));
    return ModelPrior::bernoulli(q);
  }
  throw InvalidInput("unknown model prior '" + text + "' (uniform or bernoulli:q)");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const ExperimentConfig& defaults) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::vector<std::string> known = {
      "scheme",     "n_list",     "p_plus_1_list", "error_dist", "priors",
      "model_prior", "replicates", "chain_length",  "burn_in",    "base_seed",
      "b_exponent", "s_exponent", "calibration",   "threads",    "tol"};

  std::vector<std::string> bad;
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) bad.push_back(key);

  ExperimentConfig cfg = defaults;
  const auto grab = [&](const char* key, auto&& apply) {
    if (!j.contains(key)) return;
    try {
      apply(j.at(key));
    } catch (const std::exception&) {
      bad.push_back(key);
    }
  };

  grab("scheme", [&](const json& v) { cfg.scheme = parse_scheme(v.get<std::string>()); });
  grab("n_list", [&](const json& v) { cfg.n_list = v.get<std::vector<int>>(); });
  grab("p_plus_1_list", [&](const json& v) { cfg.p_plus_1_list = v.get<std::vector<int>>(); });
  grab("error_dist", [&](const json& v) {
    cfg.error_dists.clear();
    if (v.is_string()) {
      cfg.error_dists.push_back(parse_error_dist(v.get<std::string>()));
    } else {
      for (const auto& item : v) cfg.error_dists.push_back(parse_error_dist(item.get<std::string>()));
    }
  });
  grab("priors", [&](const json& v) {
    cfg.priors.clear();
    for (const auto& item : v) cfg.priors.push_back(PriorSpec::parse(item.get<std::string>()));
  });
  grab("model_prior", [&](const json& v) { cfg.model_prior = parse_model_prior(v.get<std::string>()); });
  grab("replicates", [&](const json& v) { cfg.replicates = v.get<int>(); });
  grab("chain_length", [&](const json& v) { cfg.chain_length = v.get<long>(); });
  grab("burn_in", [&](const json& v) { cfg.burn_in = v.get<long>(); });
  grab("base_seed", [&](const json& v) { cfg.base_seed = v.get<std::uint64_t>(); });
  grab("b_exponent", [&](const json& v) { cfg.b_exponent = v.get<double>(); });
  grab("s_exponent", [&](const json& v) { cfg.s_exponent = v.get<double>(); });
  grab("calibration", [&](const json& v) { cfg.calibration = parse_calibration(v.get<std::string>()); });
  grab("threads", [&](const json& v) { cfg.threads = v.get<int>(); });
  grab("tol", [&](const json& v) { cfg.tol = v.get<double>(); });

  if (!bad.empty()) {
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    std::string msg = "config rejected; offending keys:";
    for (const auto& k : bad) msg += " " + k;
    throw ConfigError(msg, bad);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path, const ExperimentConfig& defaults) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str(), defaults);
}

namespace {

void write_manifest_header(std::ofstream& out, const RunManifest& m) {
  out << "# command=" << m.command << "\n";
  out << "# config_hash=" << m.config_hash << "\n";
  out << "# base_seed=" << m.base_seed << "\n";
  out << "# library_version=" << m.library_version << "\n";
  out << "# timestamp=" << m.timestamp << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write file '" + path + "'");
  return out;
}

}  // namespace

void write_report_csv(const std::string& path, const ExperimentReport& report,
                      const RunManifest& manifest) {
  std::ofstream out = open_out(path);
  write_manifest_header(out, manifest);
  out << "scheme,error_dist,prior,target,calibration,n,p_plus_1,replicates,mean,mse,"
         "min_one_minus_r2,cell_seed\n";
  for (const auto& row : report.rows) {
    out << row.scheme << "," << row.error_dist << "," << row.prior << "," << row.target << ","
        << row.calibration << "," << row.n << "," << row.p_plus_1 << "," << row.replicates << ","
        << format_double(row.mean) << "," << format_double(row.mse) << ","
        << format_double(row.min_one_minus_r2) << "," << row.cell_seed << "\n";
  }
}

void write_raw_csv(const std::string& path, const ExperimentReport& report,
                   const RunManifest& manifest) {
  std::ofstream out = open_out(path);
  write_manifest_header(out, manifest);
  out << "scheme,error_dist,prior,target,n,p_plus_1,replicate,value\n";
  for (const auto& row : report.rows)
    for (std::size_t r = 0; r < row.raw.size(); ++r)
      out << row.scheme << "," << row.error_dist << "," << row.prior << "," << row.target << ","
          << row.n << "," << row.p_plus_1 << "," << r << "," << format_double(row.raw[r]) << "\n";
}

void write_plot_csv(const std::string& path, const ExperimentReport& report,
                    const RunManifest& manifest) {
  std::ofstream out = open_out(path);
  write_manifest_header(out, manifest);
  out << "prior,error_dist,p_plus_1,n,mean,mse\n";
  for (const auto& row : report.rows)
    out << row.prior << "," << row.error_dist << "," << row.p_plus_1 << "," << row.n << ","
        << format_double(row.mean) << "," << format_double(row.mse) << "\n";
}

void write_manifest_json(const std::string& path, const RunManifest& manifest,
                         const ExperimentConfig& cfg) {
  std::ofstream out = open_out(path);
  json j;
  j["command"] = manifest.command;
  j["config_hash"] = manifest.config_hash;
  j["base_seed"] = manifest.base_seed;
  j["library_version"] = manifest.library_version;
  j["timestamp"] = manifest.timestamp;
  j["resolved_config"] = json::parse(resolved_config_json(cfg));
  out << j.dump(2) << "\n";
}

void write_info_report_csv(const std::string& path, const InfoConsistencyReport& report,
                           const RunManifest& manifest) {
  std::ofstream out = open_out(path);
  write_manifest_header(out, manifest);
  out << "# observed_threshold_nu1=" << report.observed_threshold_nu1
      << " stated_threshold_nu1=" << report.stated_threshold_nu1 << "\n";
  out << "# observed_threshold_nup=" << report.observed_threshold_nup
      << " stated_threshold_nup=" << report.stated_threshold_nup << "\n";
  out << "prior,n,p_alpha,one_minus_r2,log_bf,diverges\n";
  for (const auto& profile : report.profiles)
    for (const auto& pt : profile.points)
      out << profile.prior << "," << profile.n << "," << profile.p_alpha << ","
          << format_double(pt.one_minus_r2) << "," << format_double(pt.log_bf) << ","
          << (profile.diverges ? 1 : 0) << "\n";
}

void write_approx_report_csv(const std::string& path, const ApproxStudyReport& report,
                             const RunManifest& manifest) {
  std::ofstream out = open_out(path);
  write_manifest_header(out, manifest);
  out << "# fitted_exponent=" << format_double(report.fitted_exponent) << "\n";
  out << "nu,b,n,p,median_gap,mean_gap\n";
  const std::string nu = report.nu_choice == SicsVariant::kNu1 ? "1" : "p";
  for (const auto& row : report.rows)
    out << nu << "," << format_double(report.b) << "," << row.n << "," << row.p << ","
        << format_double(row.median_gap) << "," << format_double(row.mean_gap) << "\n";
}

}  // namespace gmix
