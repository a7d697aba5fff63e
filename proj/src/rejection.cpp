#include "stg/rejection.hpp"

#include <chrono>
#include <cmath>

#include "stg/errors.hpp"
#include "stg/stats.hpp"

namespace stg {

bool in_domain(const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0) return false;
    sum += x[i];
  }
  return sum <= 1.0;
}

TruncationSummary estimate_rejection(const GaussianParams& params,
                                     long m_target, long max_trials,
                                     Rng& rng) {
  if (m_target < 2) {
    throw Error(ErrorKind::validation,
                "m_target must be >= 2 for a sample covariance");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const CholeskyFactor factor = cholesky(params);
  MomentAccumulator acc(params.dim());

  long kept = 0;
  long total = 0;
  while (kept < m_target && total < max_trials) {
    const Eigen::VectorXd x = sample_mvn_one(factor, params.mean, rng);
    ++total;
    if (in_domain(x)) {
      ++kept;
      acc.add(x);
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (kept < m_target) {
    Diagnostics diag{{"m_kept", static_cast<double>(kept)},
                     {"m_total", static_cast<double>(total)},
                     {"wall_seconds", seconds}};
    throw AcceptanceTooLow(
        "rejection sampling kept " + std::to_string(kept) + " of " +
            std::to_string(total) + " trials before reaching the target",
        std::move(diag));
  }

  TruncationSummary out;
  out.z = static_cast<double>(kept) / static_cast<double>(total);
  out.z_log = std::log(out.z);
  out.mean_t = acc.mean();
  out.cov_t = acc.covariance();

  out.diagnostics["m_kept"] = static_cast<double>(kept);
  out.diagnostics["m_total"] = static_cast<double>(total);
  out.diagnostics["se_z"] =
      std::sqrt(out.z * (1.0 - out.z) / static_cast<double>(total));
  const MomentErrors errs = iid_moment_errors(out.cov_t, kept);
  for (int i = 0; i < params.dim(); ++i) {
    out.diagnostics["se_mean_" + std::to_string(i)] = errs.se_mean[i];
    for (int j = i; j < params.dim(); ++j) {
      out.diagnostics["se_cov_" + std::to_string(i) + "_" +
                      std::to_string(j)] = errs.se_cov(i, j);
    }
  }
  out.diagnostics["wall_seconds"] = seconds;
  return out;
}

}  // namespace stg
