#include "stg/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "stg/errors.hpp"
#include "stg/semi_analytic.hpp"

namespace stg {

namespace {

// Stream tags for seed derivation; frozen alongside the mix constants.
constexpr std::uint64_t kParamsStream = 1001;
constexpr std::uint64_t kRejectionStream = 1;
constexpr std::uint64_t kGessnerStream = 2;
constexpr std::uint64_t kSemiAnalyticStream = 3;

std::uint64_t method_stream(const std::string& method) {
  if (method == kMethodRejection) return kRejectionStream;
  if (method == kMethodGessner) return kGessnerStream;
  if (method == kMethodSemiAnalytic) return kSemiAnalyticStream;
  throw Error(ErrorKind::validation, "unknown method: " + method);
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

// Diagnostics blob for records.csv; timing is excluded so that reruns
// with the same master seed produce identical estimate columns.
std::string join_diagnostics(const Diagnostics& diag) {
  std::string out;
  for (const auto& [key, value] : diag) {
    if (key == "wall_seconds") continue;
    if (!out.empty()) out += ';';
    out += key + "=" + format_double(value);
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) {
    throw OutputUnwritable("cannot open " + path.string() + " for writing");
  }
  return out;
}

ComparisonRecord run_one_method(const GaussianParams& params,
                                const ExperimentConfig& config,
                                const std::string& method,
                                std::uint64_t seed) {
  ComparisonRecord rec;
  rec.method = method;
  rec.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    TruncationSummary summary;
    if (method == kMethodRejection) {
      Rng rng(seed);
      summary = estimate_rejection(params, config.rejection_m_target,
                                   config.rejection_max_trials, rng);
    } else if (method == kMethodGessner) {
      GessnerConfig gc = config.gessner;
      gc.seed = seed;
      summary = estimate_gessner(params, gc);
    } else if (method == kMethodSemiAnalytic) {
      summary = estimate_semianalytic(params, config.semianalytic_abs_tol);
    } else {
      throw Error(ErrorKind::validation, "unknown method: " + method);
    }
    rec.ok = true;
    rec.z = summary.z;
    rec.z_log = summary.z_log;
    const int n = summary.dim();
    rec.mean_t.assign(summary.mean_t.data(), summary.mean_t.data() + n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) rec.cov_t_upper.push_back(summary.cov_t(i, j));
    }
    rec.diagnostics = std::move(summary.diagnostics);
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

}  // namespace

int default_max_dim(const std::string& method) {
  if (method == kMethodRejection) return 7;
  if (method == kMethodGessner) return 10;
  if (method == kMethodSemiAnalytic) return 5;
  throw Error(ErrorKind::validation, "unknown method: " + method);
}

GaussianParams sample_experiment_params(int n, Rng& rng) {
  if (n < 2) {
    throw DimensionMismatch("experiment dimension must be >= 2");
  }
  Eigen::VectorXd mean(n);
  while (true) {
    for (int i = 0; i < n; ++i) mean[i] = rng.uniform();
    if (mean.sum() <= 1.0) break;
  }

  constexpr long kMaxRejections = 1000000;
  Eigen::MatrixXd cov(n, n);
  for (long attempt = 0; attempt < kMaxRejections; ++attempt) {
    for (int i = 0; i < n; ++i) cov(i, i) = 0.25 * rng.uniform();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double rho = -0.5 + rng.uniform();
        cov(i, j) = cov(j, i) = rho * std::sqrt(cov(i, i) * cov(j, j));
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov,
                                                       Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < 0.0) continue;
    try {
      return validate_params(mean, cov);
    } catch (const NotPositiveDefinite&) {
      continue;  // semi-definite draw; resample the whole matrix
    }
  }
  throw SamplingStalled("covariance sampling exceeded " +
                        std::to_string(kMaxRejections) + " rejections");
}

std::vector<ComparisonRecord> run_comparison(const ExperimentConfig& config) {
  if (config.dims.empty() || config.count_per_dim < 1 ||
      config.methods.empty()) {
    throw Error(ErrorKind::validation,
                "comparison needs dims, a positive count and methods");
  }
  for (const int dim : config.dims) {
    if (dim < 2) {
      throw Error(ErrorKind::validation, "dims must all be >= 2");
    }
    for (const auto& method : config.methods) {
      if (dim > default_max_dim(method) && !config.force) {
        throw Error(ErrorKind::validation,
                    "dimension " + std::to_string(dim) + " exceeds the " +
                        method + " default cutoff of " +
                        std::to_string(default_max_dim(method)) +
                        "; pass force to override");
      }
    }
  }

  std::vector<ComparisonRecord> records;
  for (const int dim : config.dims) {
    for (int index = 0; index < config.count_per_dim; ++index) {
      const std::uint64_t child =
          derive_seed(config.master_seed, static_cast<std::uint64_t>(dim),
                      static_cast<std::uint64_t>(index));
      Rng param_rng(derive_seed(child, kParamsStream));
      const GaussianParams params = sample_experiment_params(dim, param_rng);
      for (const auto& method : config.methods) {
        const std::uint64_t seed = derive_seed(child, method_stream(method));
        ComparisonRecord rec = run_one_method(params, config, method, seed);
        rec.dim = dim;
        rec.index = index;
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void report(const std::vector<ComparisonRecord>& records,
            const std::string& output_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) {
    throw OutputUnwritable("cannot create output directory " + output_dir);
  }

  {
    auto out = open_output(fs::path(output_dir) / "records.csv");
    out << "dim,index,method,ok,error,z,z_log,mean_t,cov_t_upper,"
           "diagnostics,wall_seconds,seed\n";
    for (const auto& r : records) {
      out << r.dim << ',' << r.index << ',' << r.method << ','
          << (r.ok ? 1 : 0) << ',' << csv_quote(r.error) << ','
          << format_double(r.z) << ',' << format_double(r.z_log) << ','
          << join_doubles(r.mean_t) << ',' << join_doubles(r.cov_t_upper)
          << ',' << csv_quote(join_diagnostics(r.diagnostics)) << ','
          << format_double(r.wall_seconds) << ',' << r.seed << '\n';
    }
  }

  {
    nlohmann::ordered_json timing;
    std::map<int, std::map<std::string, std::vector<double>>> per_cell;
    for (const auto& r : records) {
      per_cell[r.dim][r.method].push_back(r.wall_seconds);
    }
    for (const auto& [dim, by_method] : per_cell) {
      nlohmann::ordered_json methods;
      for (const auto& [method, times] : by_method) {
        methods[method] = {{"count", times.size()},
                           {"median", percentile(times, 0.5)},
                           {"p16", percentile(times, 0.16)},
                           {"p84", percentile(times, 0.84)}};
      }
      timing[std::to_string(dim)] = methods;
    }
    auto out = open_output(fs::path(output_dir) / "summary.json");
    out << nlohmann::ordered_json{{"timing", timing}}.dump(2) << '\n';
  }

  {
    auto out = open_output(fs::path(output_dir) / "agreement.csv");
    out << "dim,index,method_a,method_b,quantity,value_a,value_b,"
           "combined_se,abs_deviation,deviation_over_se\n";
    std::map<std::pair<int, int>, std::vector<const ComparisonRecord*>> cells;
    for (const auto& r : records) {
      cells[{r.dim, r.index}].push_back(&r);
    }
    const auto emit = [&out](const ComparisonRecord& a,
                             const ComparisonRecord& b,
                             const std::string& quantity, double va, double vb,
                             double se_a, double se_b) {
      const double se = std::sqrt(se_a * se_a + se_b * se_b);
      const double dev = std::fabs(va - vb);
      out << a.dim << ',' << a.index << ',' << a.method << ',' << b.method
          << ',' << quantity << ',' << format_double(va) << ','
          << format_double(vb) << ',' << format_double(se) << ','
          << format_double(dev) << ','
          << format_double(se > 0 ? dev / se : std::nan("")) << '\n';
    };
    const auto diag = [](const ComparisonRecord& r, const std::string& key) {
      const auto it = r.diagnostics.find(key);
      return it == r.diagnostics.end() ? 0.0 : it->second;
    };
    for (const auto& [cell, recs] : cells) {
      for (std::size_t ia = 0; ia < recs.size(); ++ia) {
        for (std::size_t ib = ia + 1; ib < recs.size(); ++ib) {
          const auto& a = *recs[ia];
          const auto& b = *recs[ib];
          if (!a.ok || !b.ok) continue;
          emit(a, b, "z", a.z, b.z, diag(a, "se_z"), diag(b, "se_z"));
          const int n = cell.first;
          for (int i = 0; i < n; ++i) {
            const std::string key = "se_mean_" + std::to_string(i);
            emit(a, b, "mean_" + std::to_string(i), a.mean_t[i], b.mean_t[i],
                 diag(a, key), diag(b, key));
          }
          int flat = 0;
          for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j, ++flat) {
              const std::string key =
                  "se_cov_" + std::to_string(i) + "_" + std::to_string(j);
              emit(a, b, "cov_" + std::to_string(i) + "_" + std::to_string(j),
                   a.cov_t_upper[flat], b.cov_t_upper[flat], diag(a, key),
                   diag(b, key));
            }
          }
        }
      }
    }
  }
}

}  // namespace stg
