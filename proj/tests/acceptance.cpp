// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Heavy statistical reproductions run on fixed seeds so results are
// stable across runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "stg/errors.hpp"
#include "stg/harness.hpp"
#include "stg/integral_hdr.hpp"
#include "stg/liness.hpp"
#include "stg/rejection.hpp"
#include "stg/semi_analytic.hpp"

using namespace stg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

void verdict(int id, const std::string& name, bool pass,
             const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double diag(const TruncationSummary& s, const std::string& key) {
  return s.diagnostics.at(key);
}

// ---------------------------------------------------------------- 1
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  double worst_semi = 0.0;

  for (int i = 0; i < 20 && pass; ++i) {
    Rng prng(derive_seed(4001, 2, i));
    const auto params = sample_experiment_params(2, prng);

    const auto fine = oracle::triangle_moments(params.mean, params.cov, 2000);
    const auto coarse = oracle::triangle_moments(params.mean, params.cov, 1200);
    if (std::fabs(fine.z - coarse.z) > 1e-9 ||
        (fine.mean - coarse.mean).cwiseAbs().maxCoeff() > 1e-9 ||
        (fine.cov - coarse.cov).cwiseAbs().maxCoeff() > 1e-9) {
      pass = false;
      detail = "oracle Richardson check failed at distribution " +
               std::to_string(i);
      break;
    }

    const auto semi = estimate_semianalytic(params, 1e-6);
    double dev = std::fabs(semi.z - fine.z);
    for (int a = 0; a < 2; ++a) {
      dev = std::max(dev, std::fabs(semi.mean_t[a] - fine.mean[a]));
      for (int b = 0; b < 2; ++b) {
        dev = std::max(dev, std::fabs(semi.cov_t(a, b) - fine.cov(a, b)));
      }
    }
    worst_semi = std::max(worst_semi, dev);
    if (dev > 1e-4) {
      pass = false;
      detail = "semi-analytic deviation " + format_double(dev) +
               " at distribution " + std::to_string(i);
      break;
    }

    Rng rej_rng(derive_seed(4002, 2, i));
    const auto rej =
        estimate_rejection(params, 10000, kDefaultMaxTrials, rej_rng);
    GessnerConfig gc;
    gc.seed = derive_seed(4003, 2, i);
    const auto ges = estimate_gessner(params, gc);

    const auto check_sampling = [&](const TruncationSummary& s,
                                    const char* label) {
      if (std::fabs(s.z - fine.z) > 4.0 * diag(s, "se_z")) {
        pass = false;
        detail = std::string(label) + " z off at distribution " +
                 std::to_string(i);
        return;
      }
      for (int a = 0; a < 2; ++a) {
        if (std::fabs(s.mean_t[a] - fine.mean[a]) >
            4.0 * diag(s, "se_mean_" + std::to_string(a))) {
          pass = false;
          detail = std::string(label) + " mean off at distribution " +
                   std::to_string(i);
          return;
        }
        for (int b = a; b < 2; ++b) {
          const double se = diag(s, "se_cov_" + std::to_string(a) + "_" +
                                        std::to_string(b));
          if (std::fabs(s.cov_t(a, b) - fine.cov(a, b)) > 4.0 * se) {
            pass = false;
            detail = std::string(label) + " cov off at distribution " +
                     std::to_string(i);
            return;
          }
        }
      }
    };
    check_sampling(rej, "rejection");
    if (pass) check_sampling(ges, "gessner");
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (pass && seconds >= 300.0) {
    pass = false;
    detail = "runtime " + format_double(seconds) + "s exceeds 300s";
  }
  if (pass) {
    detail = "20 distributions, max semi-analytic deviation " +
             format_double(worst_semi) + ", " + format_double(seconds) + "s";
  }
  verdict(1, "2-D oracle agreement", pass, detail);
}

// ---------------------------------------------------------------- 2
void criterion_2() {
  long total = 0, within = 0;
  for (const int dim : {2, 3}) {
    ExperimentConfig config;
    config.dims = {dim};
    config.count_per_dim = 100;
    config.master_seed = 777;
    const auto records = run_comparison(config);

    for (int index = 0; index < config.count_per_dim; ++index) {
      std::vector<const ComparisonRecord*> cell;
      for (const auto& r : records) {
        if (r.index == index && r.ok) cell.push_back(&r);
      }
      for (std::size_t a = 0; a < cell.size(); ++a) {
        for (std::size_t b = a + 1; b < cell.size(); ++b) {
          const auto& ra = *cell[a];
          const auto& rb = *cell[b];
          const auto se_of = [](const ComparisonRecord& r,
                                const std::string& key) {
            const auto it = r.diagnostics.find(key);
            return it == r.diagnostics.end() ? 0.0 : it->second;
          };
          const auto tally = [&](double va, double vb, const std::string& key) {
            const double se = std::hypot(se_of(ra, key), se_of(rb, key));
            ++total;
            if (std::fabs(va - vb) <= 4.0 * se) ++within;
          };
          tally(ra.z, rb.z, "se_z");
          for (int i = 0; i < dim; ++i) {
            tally(ra.mean_t[i], rb.mean_t[i], "se_mean_" + std::to_string(i));
          }
          int flat = 0;
          for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j, ++flat) {
              tally(ra.cov_t_upper[flat], rb.cov_t_upper[flat],
                    "se_cov_" + std::to_string(i) + "_" + std::to_string(j));
            }
          }
        }
      }
    }
  }
  const double frac = static_cast<double>(within) / static_cast<double>(total);
  verdict(2, "cross-method agreement at n=2,3", frac >= 0.95,
          format_double(100.0 * frac) + "% of " + std::to_string(total) +
              " comparisons within 4 combined SE");
}

// ---------------------------------------------------------------- 3
void criterion_3() {
  int improved = 0, compared = 0, guard_fired = 0, skipped = 0;
  bool finite_ok = true;
  for (int i = 0; i < 100; ++i) {
    Rng prng(derive_seed(4105, 5, i));
    const auto params = sample_experiment_params(5, prng);

    // Both tolerance settings first; the tight run also sizes the
    // benchmark below.
    const auto run_semi = [&](double tol, Eigen::MatrixXd& cov, double& z,
                              bool& ok) {
      try {
        const auto s = estimate_semianalytic(params, tol);
        if (!s.cov_t.allFinite() || !std::isfinite(s.z)) {
          finite_ok = false;
          ok = false;
          return;
        }
        cov = s.cov_t;
        z = s.z;
        ok = true;
      } catch (const ZeroIntegral&) {
        ++guard_fired;
        ok = false;
      }
    };
    Eigen::MatrixXd cov_loose, cov_tight;
    double z_loose = 0.0, z_tight = 0.0;
    bool ok_loose = false, ok_tight = false;
    run_semi(1e-4, cov_loose, z_loose, ok_loose);
    run_semi(1e-6, cov_tight, z_tight, ok_tight);

    if (!ok_tight) {
      ++compared;  // cannot beat the loose run without a usable tight run
      continue;
    }
    if (z_tight < 5e-4) {
      ++skipped;  // 10^6 accepted samples would need > 2e9 trials
      continue;
    }
    TruncationSummary bench;
    try {
      Rng rng(derive_seed(4106, 5, i));
      const long budget = static_cast<long>(3e6 / z_tight) + 1000000;
      bench = estimate_rejection(params, 1000000, budget, rng);
    } catch (const AcceptanceTooLow&) {
      ++skipped;
      continue;
    }

    const double dev_loose =
        ok_loose ? (cov_loose - bench.cov_t).cwiseAbs().maxCoeff() : kInf;
    const double dev_tight =
        (cov_tight - bench.cov_t).cwiseAbs().maxCoeff();
    ++compared;
    if (dev_tight < dev_loose) ++improved;
  }
  const bool pass = finite_ok && improved >= 90;
  verdict(3, "n=5 accuracy improves with tighter tolerance", pass,
          std::to_string(improved) + "/" + std::to_string(compared) +
              " improved (guard fired " + std::to_string(guard_fired) +
              ", benchmark skipped " + std::to_string(skipped) +
              (finite_ok ? ")" : "); non-finite covariance seen"));
}

// ---------------------------------------------------------------- 4
void criterion_4() {
  double worst_thin2 = 0.0, worst_thin10 = 0.0;
  int used = 0;
  for (int i = 0; i < 100; ++i) {
    Rng prng(derive_seed(4207, 7, i));
    const auto params = sample_experiment_params(7, prng);

    TruncationSummary rej;
    try {
      Rng rng(derive_seed(4208, 7, i));
      rej = estimate_rejection(params, 10000, kDefaultMaxTrials, rng);
    } catch (const AcceptanceTooLow&) {
      continue;
    }
    ++used;

    const auto rel_dev = [&](const TruncationSummary& g) {
      double worst = 0.0;
      for (int a = 0; a < 7; ++a) {
        for (int b = a; b < 7; ++b) {
          const double scale =
              std::sqrt(rej.cov_t(a, a) * rej.cov_t(b, b));
          worst = std::max(worst,
                           std::fabs(g.cov_t(a, b) - rej.cov_t(a, b)) / scale);
        }
      }
      return worst;
    };

    GessnerConfig thin2;
    thin2.seed = derive_seed(4209, 7, i);
    thin2.thin_moments = 2;
    GessnerConfig thin10 = thin2;
    thin10.thin_moments = 10;
    worst_thin2 = std::max(worst_thin2, rel_dev(estimate_gessner(params, thin2)));
    worst_thin10 =
        std::max(worst_thin10, rel_dev(estimate_gessner(params, thin10)));
  }
  verdict(4, "n=7 thinning improves moment agreement",
          worst_thin10 < worst_thin2,
          "max relative covariance deviation " + format_double(worst_thin2) +
              " (thin 2) vs " + format_double(worst_thin10) + " (thin 10) on " +
              std::to_string(used) + " distributions");
}

// ---------------------------------------------------------------- 5
void criterion_5() {
  Eigen::Matrix3d cov;
  cov << 0.04, 0.01, -0.008, 0.01, 0.05, 0.012, -0.008, 0.012, 0.06;
  const auto params =
      validate_params(Eigen::Vector3d(0.3, 0.25, 0.2), cov);

  const double oracle_z = estimate_semianalytic(params, 1e-6).z;

  // Independent cross-check: 10^7 direct trials.
  const auto factor = cholesky(params);
  Rng mc_rng(4310);
  long kept = 0;
  const long trials = 10000000;
  for (long t = 0; t < trials; ++t) {
    if (in_domain(sample_mvn_one(factor, params.mean, mc_rng))) ++kept;
  }
  const double mc_z = static_cast<double>(kept) / static_cast<double>(trials);
  const double mc_se = std::sqrt(mc_z * (1.0 - mc_z) / trials);
  if (std::fabs(oracle_z - mc_z) > 3.0 * mc_se) {
    verdict(5, "HDR unbiasedness", false,
            "oracle Z " + format_double(oracle_z) +
                " disagrees with Monte Carlo " + format_double(mc_z));
    return;
  }

  const auto constraints = simplex_constraints(params);
  GessnerConfig config;
  Rng srng(4311);
  const auto schedule = subset_simulation(constraints, factor, config, srng);

  const int runs = 50;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    Rng rng(derive_seed(4312, r));
    const auto hdr = hdr_estimate(constraints, factor, schedule, config, rng);
    const double z = std::exp(hdr.log_z);
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / runs;
  const double sd =
      std::sqrt((sum2 / runs - mean * mean) * runs / (runs - 1.0));
  const double se_mean = sd / std::sqrt(static_cast<double>(runs));
  const bool pass = std::fabs(mean - oracle_z) <= 3.0 * se_mean;
  verdict(5, "HDR unbiasedness", pass,
          "mean of 50 runs " + format_double(mean) + " vs oracle " +
              format_double(oracle_z) + " (3 SE = " +
              format_double(3.0 * se_mean) + ")");
}

// ---------------------------------------------------------------- 6
void criterion_6() {
  long steps = 0, violations = 0;
  for (int dim = 2; dim <= 5 && violations == 0; ++dim) {
    for (int rep = 0; rep < 7; ++rep) {
      Rng prng(derive_seed(4413, dim, rep));
      const auto params = sample_experiment_params(dim, prng);
      const auto constraints = simplex_constraints(params);
      const auto factor = cholesky(params);
      Rng rng(derive_seed(4414, dim, rep));
      Eigen::VectorXd y = initial_point(params);
      for (int s = 0; s < 3600; ++s) {
        y = liness_step(constraints, factor, y, rng);
        ++steps;
        if ((constraints.a_matrix * y + constraints.c_vector).minCoeff() <
            -1e-9) {
          ++violations;
          break;
        }
      }
    }
  }

  long residual_bad = 0;
  Rng rng(4415);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + static_cast<int>(rng.integer(5));
    Eigen::VectorXd y(n), nu(n), row(n);
    for (int i = 0; i < n; ++i) {
      y[i] = rng.normal();
      nu[i] = rng.normal();
      row[i] = rng.normal();
    }
    const double c = 2.0 * rng.normal();
    for (const double theta : constraint_intersections(row, c, y, nu)) {
      if (std::fabs(row.dot(ellipse_point(y, nu, theta)) + c) >= 1e-9) {
        ++residual_bad;
      }
    }
  }
  const bool pass = violations == 0 && residual_bad == 0 && steps >= 100000;
  verdict(6, "LIN-ESS exactness", pass,
          std::to_string(steps) + " steps, " + std::to_string(violations) +
              " constraint violations, " + std::to_string(residual_bad) +
              " bad residuals");
}

// ---------------------------------------------------------------- 7
void criterion_7() {
  bool pass = true;
  std::string detail = "all invariants hold";

  for (int dim = 2; dim <= 4 && pass; ++dim) {
    for (int i = 0; i < 10 && pass; ++i) {
      Rng prng(derive_seed(4516, dim, i));
      const auto params = sample_experiment_params(dim, prng);
      const auto s = estimate_semianalytic(params, 1e-6);
      if (!(s.z > 0.0 && s.z <= 1.0)) {
        pass = false;
        detail = "Z out of (0,1] at n=" + std::to_string(dim);
        break;
      }
      if (s.mean_t.minCoeff() < -1e-6 || s.mean_t.sum() > 1.0 + 1e-6) {
        pass = false;
        detail = "mean outside the closed simplex at n=" + std::to_string(dim);
        break;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> psd(s.cov_t);
      if (psd.eigenvalues().minCoeff() < -1e-6) {
        pass = false;
        detail = "covariance not PSD within 1e-6";
        break;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> shrink(params.cov -
                                                            s.cov_t);
      if (shrink.eigenvalues().minCoeff() < -1e-6) {
        pass = false;
        detail = "truncation inflated the covariance";
        break;
      }
      const double regions = std::pow(2.0, dim + 1) - 2.0;
      if (diag(s, "phi_calls_regions") != regions) {
        pass = false;
        detail = "region count mismatch";
        break;
      }
    }
  }

  if (pass) {
    // Permutation equivariance at n=3.
    Rng prng(derive_seed(4517, 3, 0));
    const auto params = sample_experiment_params(3, prng);
    const auto base = estimate_semianalytic(params, 1e-6);
    const std::vector<int> perm = {2, 0, 1};
    Eigen::Vector3d pmean;
    Eigen::Matrix3d pcov;
    for (int i = 0; i < 3; ++i) {
      pmean[i] = params.mean[perm[i]];
      for (int j = 0; j < 3; ++j) pcov(i, j) = params.cov(perm[i], perm[j]);
    }
    const auto permuted =
        estimate_semianalytic(validate_params(pmean, pcov), 1e-6);
    if (std::fabs(base.z - permuted.z) > 5e-6) {
      pass = false;
      detail = "Z changed under permutation";
    }
    for (int i = 0; i < 3 && pass; ++i) {
      if (std::fabs(base.mean_t[perm[i]] - permuted.mean_t[i]) > 5e-6) {
        pass = false;
        detail = "mean not equivariant under permutation";
      }
    }
  }

  if (pass) {
    // Marginal densities normalize to 1.
    Rng rng(4518);
    Eigen::Matrix3d base;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) base(i, j) = rng.normal();
    }
    const Eigen::Matrix3d eps =
        base * base.transpose() / 3.0 + Eigen::Matrix3d::Identity();
    Eigen::Vector3d a(-1.3, -0.9, -1.7), b(1.1, 1.5, 0.8);
    const HyperRectangle rect(a, b);
    for (int k = 0; k < 3 && pass; ++k) {
      const double integral = oracle::integrate_1d(
          [&](double w) { return marginal_univariate(k, w, eps, rect, 1e-6); },
          a[k], b[k], 200);
      if (std::fabs(integral - 1.0) > 5e-4) {
        pass = false;
        detail = "univariate marginal normalization off by " +
                 format_double(std::fabs(integral - 1.0));
      }
    }
    if (pass) {
      const double integral = oracle::integrate_1d(
          [&](double wk) {
            return oracle::integrate_1d(
                [&](double wq) {
                  return marginal_bivariate(0, 2, wk, wq, eps, rect, 1e-5);
                },
                a[2], b[2], 80);
          },
          a[0], b[0], 80);
      if (std::fabs(integral - 1.0) > 5e-4) {
        pass = false;
        detail = "bivariate marginal normalization off by " +
                 format_double(std::fabs(integral - 1.0));
      }
    }
  }
  verdict(7, "structural invariants", pass, detail);
}

// ---------------------------------------------------------------- 8
void criterion_8() {
  bool pass = true;
  std::string detail;
  for (int dim = 2; dim <= 5 && pass; ++dim) {
    Rng prng(derive_seed(4619, dim, 0));
    const auto params = sample_experiment_params(dim, prng);
    const auto s = estimate_semianalytic(params, 1e-4);
    const double expected = std::pow(2.0, dim + 1) - 2.0;
    if (diag(s, "phi_calls_regions") != expected) {
      pass = false;
      detail = "region-level call count at n=" + std::to_string(dim) +
               " is " + format_double(diag(s, "phi_calls_regions")) +
               ", expected " + format_double(expected);
    }
  }

  if (pass) {
    namespace fs = std::filesystem;
    ExperimentConfig config;
    config.dims = {2, 3};
    config.count_per_dim = 5;
    config.master_seed = 4620;
    config.rejection_m_target = 2000;
    config.gessner.m_hdr = 2000;
    config.gessner.m_moments = 2000;
    const fs::path dir = fs::temp_directory_path() / "stg_acceptance_timing";
    fs::remove_all(dir);
    report(run_comparison(config), dir.string());
    std::ifstream in(dir / "summary.json");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    for (const char* key : {"median", "p16", "p84"}) {
      if (text.find(key) == std::string::npos) {
        pass = false;
        detail = std::string("summary.json lacks ") + key;
      }
    }
    if (pass) {
      detail = "region Phi-calls scale as 2^(n+1)-2; timing summary written "
               "(absolute timings are implementation-specific by design)";
    }
    fs::remove_all(dir);
  }
  verdict(8, "cost accounting and timing report", pass, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria failed\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
