#include "stg/integral_hdr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "stg/errors.hpp"
#include "stg/stats.hpp"

namespace stg {

namespace {

std::vector<double> shift_values(const LinearConstraints& constraints,
                                 const std::vector<Eigen::VectorXd>& ys) {
  std::vector<double> g(ys.size());
  for (std::size_t m = 0; m < ys.size(); ++m) {
    g[m] = shift_value(constraints, ys[m]);
  }
  return g;
}

long count_below(const std::vector<double>& g, double gamma) {
  return std::count_if(g.begin(), g.end(),
                       [gamma](double v) { return v < gamma; });
}

// Restart state for the next level: a uniformly chosen current sample
// that already lies inside it.
Eigen::VectorXd pick_inside(const std::vector<Eigen::VectorXd>& ys,
                            const std::vector<double>& g, double gamma,
                            Rng& rng) {
  std::vector<std::size_t> inside;
  for (std::size_t m = 0; m < ys.size(); ++m) {
    if (g[m] < gamma) inside.push_back(m);
  }
  return ys[inside[rng.integer(inside.size())]];
}

}  // namespace

double shift_value(const LinearConstraints& constraints,
                   const Eigen::VectorXd& y) {
  if (y.size() != constraints.dim()) {
    throw DimensionMismatch("state dimension does not match constraints");
  }
  return -(constraints.a_matrix * y + constraints.c_vector).minCoeff();
}

namespace {

void validate_config(const GessnerConfig& config) {
  if (!(config.rho > 0.0 && config.rho < 1.0)) {
    throw Error(ErrorKind::validation, "rho must lie in (0, 1)");
  }
  if (config.m_subset < 1 || config.m_hdr < 1 || config.m_moments < 1 ||
      config.thin_subset < 1 || config.thin_hdr < 1 ||
      config.thin_moments < 1 || config.burn_in < 0 ||
      config.max_levels < 1) {
    throw Error(ErrorKind::validation, "counts must be positive");
  }
}

}  // namespace

LevelSchedule subset_simulation(const LinearConstraints& constraints,
                                const CholeskyFactor& factor,
                                const GessnerConfig& config, Rng& rng) {
  validate_config(config);
  const int m = config.m_subset;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(constraints.dim());
  std::vector<Eigen::VectorXd> ys = sample_mvn(factor, zero, rng, m);

  LevelSchedule schedule;
  schedule.biased_log_z = 0.0;
  while (true) {
    if (schedule.levels() >= config.max_levels) {
      throw MaxLevelsExceeded("subset simulation exceeded " +
                              std::to_string(config.max_levels) + " levels");
    }
    std::vector<double> g = shift_values(constraints, ys);
    std::vector<double> sorted = g;
    std::sort(sorted.begin(), sorted.end());

    // k-th/(k+1)-th order statistic midpoint, k = ceil(rho*M).
    const int k = static_cast<int>(
        std::ceil(config.rho * static_cast<double>(m)));
    double gamma = 0.5 * (sorted[k - 1] + sorted[k]);
    if (gamma < 0.0) gamma = 0.0;

    const long below = count_below(g, gamma);
    if (below == 0) {
      throw LevelStall("no samples below the proposed level shift");
    }
    schedule.gammas.push_back(gamma);
    schedule.per_level_counts.push_back(below);
    schedule.biased_log_z +=
        std::log(static_cast<double>(below)) - std::log(static_cast<double>(m));

    if (gamma == 0.0) break;

    const LinearConstraints loosened = shifted_constraints(constraints, gamma);
    const Eigen::VectorXd start = pick_inside(ys, g, gamma, rng);
    ys = sample_liness(loosened, factor, start, m, config.thin_subset, 0, rng);
  }
  return schedule;
}

HdrResult hdr_estimate(const LinearConstraints& constraints,
                       const CholeskyFactor& factor,
                       const LevelSchedule& schedule,
                       const GessnerConfig& config, Rng& rng) {
  validate_config(config);
  const long m = config.m_hdr;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(constraints.dim());
  std::vector<Eigen::VectorXd> ys = sample_mvn(factor, zero, rng, m);

  HdrResult out;
  double se_sum = 0.0;  // sum of (1-p)/(p*m): delta method on log p
  for (int level = 0; level < schedule.levels(); ++level) {
    const double gamma = schedule.gammas[level];
    const std::vector<double> g = shift_values(constraints, ys);
    const long below = count_below(g, gamma);
    out.diagnostics["count_level_" + std::to_string(level + 1)] =
        static_cast<double>(below);
    if (below == 0) {
      out.log_z = -std::numeric_limits<double>::infinity();
      out.diagnostics["zero_count_level"] = level + 1.0;
      return out;
    }
    const double p = static_cast<double>(below) / static_cast<double>(m);
    out.diagnostics["p_level_" + std::to_string(level + 1)] = p;
    out.log_z += std::log(p);
    se_sum += (1.0 - p) / (p * static_cast<double>(m));

    if (gamma == 0.0) break;
    const LinearConstraints loosened = shifted_constraints(constraints, gamma);
    const Eigen::VectorXd start = pick_inside(ys, g, gamma, rng);
    ys = sample_liness(loosened, factor, start, m, config.thin_hdr, 0, rng);
  }
  out.diagnostics["levels"] = schedule.levels();
  out.diagnostics["se_log_z"] = std::sqrt(se_sum);
  out.diagnostics["se_z"] = std::exp(out.log_z) * std::sqrt(se_sum);
  return out;
}

TruncationSummary estimate_gessner(const GaussianParams& params,
                                   const GessnerConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const CholeskyFactor factor = cholesky(params);
  const LinearConstraints constraints = simplex_constraints(params);

  Rng subset_rng(derive_seed(config.seed, 1));
  Rng hdr_rng(derive_seed(config.seed, 2));
  Rng moments_rng(derive_seed(config.seed, 3));

  const LevelSchedule schedule =
      subset_simulation(constraints, factor, config, subset_rng);
  const HdrResult hdr =
      hdr_estimate(constraints, factor, schedule, config, hdr_rng);
  if (std::isinf(hdr.log_z)) {
    Diagnostics diag = hdr.diagnostics;
    diag["levels"] = schedule.levels();
    throw ZeroCount("HDR level contained no interior samples", std::move(diag));
  }

  const std::vector<Eigen::VectorXd> draws =
      sample_liness(constraints, factor, initial_point(params),
                    config.m_moments, config.thin_moments, config.burn_in,
                    moments_rng);
  MomentAccumulator acc(params.dim());
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(draws.size());
  for (const auto& y : draws) {
    xs.push_back(y + params.mean);
    acc.add(xs.back());
  }

  TruncationSummary out;
  out.z_log = hdr.log_z;
  out.z = std::exp(hdr.log_z);
  out.mean_t = acc.mean();
  out.cov_t = acc.covariance();
  out.diagnostics = hdr.diagnostics;
  out.diagnostics["subset_levels"] = schedule.levels();
  out.diagnostics["subset_biased_log_z"] = schedule.biased_log_z;
  out.diagnostics["m_moments"] = static_cast<double>(config.m_moments);

  const MomentErrors errs = batch_moment_errors(xs);
  for (int i = 0; i < params.dim(); ++i) {
    out.diagnostics["se_mean_" + std::to_string(i)] = errs.se_mean[i];
    for (int j = i; j < params.dim(); ++j) {
      out.diagnostics["se_cov_" + std::to_string(i) + "_" +
                      std::to_string(j)] = errs.se_cov(i, j);
    }
  }
  out.diagnostics["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace stg
