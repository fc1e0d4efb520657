#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ellspec/kernel_ops.hpp"
#include "ellspec/schatten.hpp"

namespace ellspec {

/// Experiment configuration read from flat `key = value` text.
///
/// Lines starting with '#' are comments. Numeric parameters accept
/// comma-separated lists. Recognised keys:
///
///   experiment   plancherel | invariance | schatten-identity | trace-formula |
///                kernel-sobolev | subelliptic-threshold |
///                schrodinger-threshold | nuclearity-threshold
///   model        model id (t1, t2, s2, s3, su2-sub, so3-h<gamma>)
///   levels       retained eigenvalue levels (0 or absent: experiment default)
///   resolution   quadrature resolution (0 or absent: smallest exact one)
///   seed         LCG seed, default 42
///   output       path prefix for <prefix>.json, <prefix>.csv, <prefix>.dat
///
/// Numeric parameters: alpha, r, s, mu1, mu2, gamma, p1, p2, trials,
/// perturbation, tol, threshold, margin, probe_levels, basis_free.
struct ExperimentConfig {
  std::string experiment;
  std::string model;
  std::size_t levels = 0;
  std::size_t resolution = 0;
  std::uint64_t seed = 42;
  std::string output;
  std::map<std::string, std::vector<double>> params;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig from_file(const std::filesystem::path& path);

  bool has(const std::string& key) const { return params.count(key) != 0; }
  /// Single value of a parameter; throws if absent or list-valued.
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  const std::vector<double>& list(const std::string& key) const;
  std::vector<double> list_or(const std::string& key, std::vector<double> fallback) const;

  /// Throws on unknown experiments, missing or malformed parameters.
  void validate() const;
  /// Serialises back to `key = value` lines (round-trips through parse).
  std::string to_text() const;
};

struct CaseResult {
  std::string name;
  /// Swept quantity for this case (alpha, s, trial index, ...).
  double value = 0.0;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, std::string>> labels;
  /// Series summary, if the case classifies a series.
  bool has_series = false;
  double partial_sum = 0.0;
  double fitted_exponent = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> block_sums;
  CheckStatus status = CheckStatus::Inconclusive;
  std::string error;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CaseResult> cases;
  /// Pass only if every case passes; fail if any case fails.
  CheckStatus status = CheckStatus::Inconclusive;
  double wall_time_seconds = 0.0;

  /// JSON document:
  ///   {"schema": "ellspec-report/1", "experiment", "config": {...},
  ///    "status", "cases": [{"name", "value", "status", "values": {...},
  ///    "labels": {...}, "series": {"partial_sum", "fitted_exponent",
  ///    "verdict", "block_sums"}, "error"}], "wall_time_seconds"}
  std::string to_json(bool include_wall_time = true) const;
  /// Columns: case, value, partial_sum, fitted_exponent, verdict, status.
  std::string to_csv() const;
  /// Whitespace-delimited `case_index block log2_block_sum` rows.
  std::string to_plot_data() const;
  /// The case used in sweep CSVs: the first one carrying a series, else the first.
  const CaseResult* primary_case() const;
};

/// Runs the configured experiment. Configuration errors throw before any
/// computation; numerical errors inside a case are recorded in that case.
/// When config.output is set the JSON, CSV and plot data are written.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

void write_report(const ExperimentReport& report, const std::filesystem::path& prefix);

/// One report per value of `parameter` (a numeric key, or levels /
/// resolution / seed), run on up to `jobs` threads; output in input order.
std::vector<ExperimentReport> sweep(const ExperimentConfig& cfg, const std::string& parameter,
                                    const std::vector<double>& values, unsigned jobs = 1);

/// Columns: value, partial_sum, fitted_exponent, verdict.
std::string sweep_csv(const std::vector<ExperimentReport>& reports,
                      const std::vector<double>& values);

}  // namespace ellspec
