#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "estimators.hpp"

// Reproducible Monte Carlo experiments. Replicate r draws from
// RngStream{seed, r}; horizon index h uses the disjoint counter block
// starting at h * 2^40, so records are a pure function of the config and do
// not depend on scheduling or worker count.

namespace fou2 {

class config_error : public std::runtime_error {
 public:
  config_error(const std::string& msg, std::vector<std::string> keys)
      : std::runtime_error(msg), offending_keys(std::move(keys)) {}
  std::vector<std::string> offending_keys;
};

struct ExperimentConfig {
  ModelParams params;
  std::vector<double> horizons;
  double dt = 0.025;
  int replicates = 1;
  std::vector<EstimatorKind> estimators;
  std::uint64_t seed = 0;
  Route route = Route::kExactCholesky;
  Scheme scheme = Scheme::kLeftPoint;
  std::size_t grid_cap = 0;  // 0 -> default_grid_cap()

  void validate() const;
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);
  std::string serialize() const;  // canonical key=value echo
};

struct ReplicateRecord {
  int replicate = 0;
  double horizon = 0.0;
  EstimatorKind estimator = EstimatorKind::kPathwise;
  double theta_hat = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string error;
};

struct GroupAggregate {
  double horizon = 0.0;
  EstimatorKind estimator = EstimatorKind::kPathwise;
  int n_ok = 0;
  int n_fail = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  double median = std::numeric_limits<double>::quiet_NaN();
  // KS distance of sqrt(T)(theta_hat - theta)/sigma against the standard
  // normal; NaN when the group is smaller than 20.
  double ks = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReplicateRecord> records;  // ordered by (replicate, T, estimator)
  std::vector<GroupAggregate> aggregates;
  double ref_stationary_variance = 0.0;
  double ref_sigma_squared = 0.0;
  double ref_correction_limit = 0.0;
  int total_failures = 0;
};

// Sup-distance between the empirical CDF of a pre-standardized sample and
// the standard normal CDF. Requires >= 20 observations.
double ks_statistic(std::vector<double> standardized_sample);

// Per-(horizon, estimator) aggregates; deterministic in the records alone.
std::vector<GroupAggregate> summarize(
    const std::vector<ReplicateRecord>& records, const ExperimentConfig& cfg,
    double sigma);

// Runs every (replicate, horizon, estimator) cell; per-replicate failures are
// recorded rather than fatal unless they exceed 10% of all cells.
ExperimentReport run_experiment(const ExperimentConfig& cfg, int workers = 1);

// records.tsv, aggregates.tsv and manifest.txt under out_dir.
void write_report(const ExperimentReport& report, const std::string& out_dir);

}  // namespace fou2
