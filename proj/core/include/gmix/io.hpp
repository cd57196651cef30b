#pragma once

#include <cstdint>
#include <string>

#include "gmix/dataset.hpp"
#include "gmix/experiments.hpp"

namespace gmix {

/// Shortest decimal representation that round-trips the double exactly;
/// keeps report files byte-deterministic across platforms.
std::string format_double(double v);

/// CSV with a header row; first column is the response, remaining columns
/// are regressors. Strict parsing: a non-numeric cell, a ragged row, or
/// p >= n is an error.
Dataset load_dataset(const std::string& path);

/// Writes y,x1,...,xp with round-trip formatting, so load(save(d)) rebuilds
/// the identical Dataset bit for bit.
void save_dataset(const Dataset& d, const std::string& path);

struct RunManifest {
  std::string command;
  std::string config_hash;  // digest of the resolved config (timestamp-free)
  std::uint64_t base_seed = 0;
  std::string library_version;
  std::string timestamp;  // ISO-8601 UTC
};

std::string library_version();

/// Canonical JSON serialization of a resolved config: object keys sorted,
/// numbers round-trip formatted. Equal configs serialize identically.
std::string resolved_config_json(const ExperimentConfig& cfg);

/// FNV-1a digest of the canonical serialization, in hex.
std::string config_digest(const std::string& canonical_json);

RunManifest make_manifest(const std::string& command, const ExperimentConfig& cfg);

/// Parse a config document (JSON text). Unknown keys, type mismatches and
/// domain violations raise ConfigError listing every offending key.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const ExperimentConfig& defaults);
ExperimentConfig load_experiment_config(const std::string& path, const ExperimentConfig& defaults);

/// Report CSV: '#'-prefixed manifest header, then one row per cell. The body
/// (everything except the timestamp header line) is a pure function of the
/// resolved config.
void write_report_csv(const std::string& path, const ExperimentReport& report,
                      const RunManifest& manifest);

/// Per-replicate raw values, one row per (cell, replicate).
void write_raw_csv(const std::string& path, const ExperimentReport& report,
                   const RunManifest& manifest);

/// Tidy (prior, n, mean, mse) table for plotting mean/mse against n.
void write_plot_csv(const std::string& path, const ExperimentReport& report,
                    const RunManifest& manifest);

void write_manifest_json(const std::string& path, const RunManifest& manifest,
                         const ExperimentConfig& cfg);

void write_info_report_csv(const std::string& path, const InfoConsistencyReport& report,
                           const RunManifest& manifest);

void write_approx_report_csv(const std::string& path, const ApproxStudyReport& report,
                             const RunManifest& manifest);

}  // namespace gmix
