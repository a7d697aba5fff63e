#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stg/gaussian.hpp"
#include "stg/liness.hpp"
#include "stg/summary.hpp"

namespace stg {

/// Nested-domain schedule produced by subset simulation: strictly
/// decreasing shift values ending at exactly 0, the (biased) log-integral
/// accumulated along the way, and the per-level counts below the next
/// shift.
struct LevelSchedule {
  std::vector<double> gammas;
  double biased_log_z = 0.0;
  std::vector<long> per_level_counts;

  int levels() const { return static_cast<int>(gammas.size()); }
};

/// Settings for the Gessner et al. pipeline. Defaults follow the
/// recommended values: rho = 0.5, M = 16 subset samples with thinning 10,
/// 10^4 HDR / moment samples with thinning 2.
struct GessnerConfig {
  double rho = 0.5;
  int m_subset = 16;
  long m_hdr = 10000;
  int thin_subset = 10;
  int thin_hdr = 2;
  long m_moments = 10000;
  int thin_moments = 2;
  long burn_in = 100;
  std::uint64_t seed = 0;
  int max_levels = 200;
};

/// Violation depth g = -min(A*y + c); g <= 0 iff y is inside the target
/// domain.
double shift_value(const LinearConstraints& constraints,
                   const Eigen::VectorXd& y);

/// Adaptive construction of the nested domains. Each next shift is the
/// midpoint between the k-th and (k+1)-th smallest sample shift values
/// with k = ceil(rho*M); negative proposals clamp to 0 and terminate.
LevelSchedule subset_simulation(const LinearConstraints& constraints,
                                const CholeskyFactor& factor,
                                const GessnerConfig& config, Rng& rng);

struct HdrResult {
  double log_z = 0.0;
  Diagnostics diagnostics;  // per-level probabilities, counts, se_z
};

/// Unbiased re-estimate of log Z over the fixed schedule using m_hdr
/// samples per level. A level with zero interior samples returns
/// log_z = -inf (diagnostics say which level died).
HdrResult hdr_estimate(const LinearConstraints& constraints,
                       const CholeskyFactor& factor,
                       const LevelSchedule& schedule,
                       const GessnerConfig& config, Rng& rng);

/// Full pipeline: subset simulation -> HDR for Z, a LIN-ESS chain on the
/// target domain for the moments (converted back to x = y + mu).
TruncationSummary estimate_gessner(const GaussianParams& params,
                                   const GessnerConfig& config);

}  // namespace stg
