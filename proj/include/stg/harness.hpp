#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stg/gaussian.hpp"
#include "stg/integral_hdr.hpp"
#include "stg/mvn_cdf.hpp"
#include "stg/rejection.hpp"
#include "stg/summary.hpp"

namespace stg {

/// Method identifiers as they appear in records and on the CLI.
inline constexpr const char* kMethodRejection = "rejection";
inline constexpr const char* kMethodGessner = "gessner";
inline constexpr const char* kMethodSemiAnalytic = "semianalytic";

/// Per-method default dimension cutoffs from the comparison experiment;
/// exceeding them without `force` is rejected.
int default_max_dim(const std::string& method);

struct ExperimentConfig {
  std::vector<int> dims;
  int count_per_dim = 100;
  std::vector<std::string> methods = {kMethodRejection, kMethodGessner,
                                      kMethodSemiAnalytic};
  std::uint64_t master_seed = 0;
  std::string output_dir;
  bool force = false;

  long rejection_m_target = kDefaultRejectionTarget;
  long rejection_max_trials = kDefaultMaxTrials;
  GessnerConfig gessner;  // seed is overwritten per cell
  double semianalytic_abs_tol = kDefaultAbsTol;
};

/// One (distribution, method) result row. mean_t is flattened; cov_t is
/// the upper triangle flattened row-major. Failed methods carry an error
/// string instead of estimates.
struct ComparisonRecord {
  int dim = 0;
  int index = 0;
  std::string method;
  bool ok = false;
  std::string error;
  double z = 0.0;
  double z_log = 0.0;
  std::vector<double> mean_t;
  std::vector<double> cov_t_upper;
  Diagnostics diagnostics;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

/// Random experiment parameters: mu uniform in the unit simplex (resample
/// whole vector until the sum is <= 1), diagonal variances U(0, 0.25),
/// off-diagonals from correlations U(-0.5, 0.5), whole matrix resampled
/// until the eigenvalues are non-negative (and strictly positive definite
/// for validate_params).
GaussianParams sample_experiment_params(int n, Rng& rng);

/// Runs every requested method on identical per-(dim, index) parameters.
/// Child seeds derive from (master_seed, dim, index); method streams are
/// further split so no two methods share randomness. Method errors are
/// recorded, not propagated.
std::vector<ComparisonRecord> run_comparison(const ExperimentConfig& config);

/// Percentile of a sample under linear interpolation at position
/// 1 + p*(N-1) of the sorted values (p in [0, 1]).
double percentile(std::vector<double> values, double p);

/// Writes records.csv, summary.json (per-dim/method median and 16th/84th
/// wall-time percentiles) and agreement.csv (pairwise per-distribution
/// method deviations in units of combined standard errors).
void report(const std::vector<ComparisonRecord>& records,
            const std::string& output_dir);

/// Shortest round-trip decimal formatting used in all output files.
std::string format_double(double v);

}  // namespace stg
