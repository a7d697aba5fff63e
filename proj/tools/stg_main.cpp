// stg: integral, mean and covariance of simplex-truncated multivariate
// normal distributions, by rejection sampling, the Gessner et al.
// sampler, or the semi-analytical inclusion-exclusion method.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stg/errors.hpp"
#include "stg/harness.hpp"
#include "stg/integral_hdr.hpp"
#include "stg/rejection.hpp"
#include "stg/semi_analytic.hpp"

namespace {

using stg::Error;
using stg::ErrorKind;

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(cleaned);
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) {
    throw Error(ErrorKind::validation, "cannot parse number list: " + text);
  }
  return out;
}

// Covariance from a file (n rows of n whitespace-separated decimals) or
// inline with ';' separating rows.
Eigen::MatrixXd parse_covariance(const std::string& spec, int n) {
  std::vector<std::vector<double>> rows;
  std::ifstream file(spec);
  if (file) {
    std::string line;
    while (std::getline(file, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      rows.push_back(parse_number_list(line));
    }
  } else {
    std::stringstream in(spec);
    std::string part;
    while (std::getline(in, part, ';')) rows.push_back(parse_number_list(part));
  }
  if (static_cast<int>(rows.size()) != n) {
    throw Error(ErrorKind::validation,
                "covariance has " + std::to_string(rows.size()) +
                    " rows, expected " + std::to_string(n));
  }
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      throw Error(ErrorKind::validation,
                  "covariance row " + std::to_string(i) + " has " +
                      std::to_string(rows[i].size()) + " entries");
    }
    for (int j = 0; j < n; ++j) cov(i, j) = rows[i][j];
  }
  return cov;
}

// "2..5" or "2,3,7".
std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const int lo = std::stoi(text.substr(0, range));
    const int hi = std::stoi(text.substr(range + 2));
    for (int d = lo; d <= hi; ++d) dims.push_back(d);
  } else {
    for (double v : parse_number_list(text)) dims.push_back(static_cast<int>(v));
  }
  if (dims.empty()) {
    throw Error(ErrorKind::validation, "no dimensions given");
  }
  return dims;
}

nlohmann::ordered_json summary_to_json(const stg::TruncationSummary& summary) {
  nlohmann::ordered_json j;
  j["z"] = summary.z;
  j["z_log"] = summary.z_log;
  j["mean_t"] = std::vector<double>(
      summary.mean_t.data(), summary.mean_t.data() + summary.dim());
  std::vector<std::vector<double>> cov;
  for (int i = 0; i < summary.dim(); ++i) {
    cov.emplace_back(summary.cov_t.row(i).data(),
                     summary.cov_t.row(i).data() + summary.dim());
  }
  j["cov_t"] = cov;
  j["diagnostics"] = summary.diagnostics;
  return j;
}

void print_summary_plain(const stg::TruncationSummary& summary) {
  std::cout << "z      " << stg::format_double(summary.z) << "\n";
  std::cout << "log z  " << stg::format_double(summary.z_log) << "\n";
  std::cout << "mean_t";
  for (int i = 0; i < summary.dim(); ++i) {
    std::cout << ' ' << stg::format_double(summary.mean_t[i]);
  }
  std::cout << "\ncov_t\n";
  for (int i = 0; i < summary.dim(); ++i) {
    std::cout << " ";
    for (int j = 0; j < summary.dim(); ++j) {
      std::cout << ' ' << stg::format_double(summary.cov_t(i, j));
    }
    std::cout << "\n";
  }
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::validation:
      return 2;
    case ErrorKind::method:
      return 3;
    case ErrorKind::io:
      return 4;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simplex-truncated multivariate normal estimators"};
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand(
      "estimate", "estimate Z, mean and covariance for one distribution");
  std::string method = stg::kMethodSemiAnalytic;
  std::string mean_text;
  std::string cov_spec;
  long samples = stg::kDefaultRejectionTarget;
  double abs_tol = stg::kDefaultAbsTol;
  std::uint64_t seed = 0;
  bool as_json = false;
  estimate
      ->add_option("--method", method,
                   "rejection | gessner | semianalytic")
      ->check(CLI::IsMember({stg::kMethodRejection, stg::kMethodGessner,
                             stg::kMethodSemiAnalytic}));
  estimate->add_option("--mean", mean_text, "comma-separated mean vector")
      ->required();
  estimate
      ->add_option("--cov", cov_spec,
                   "covariance: path to a text file (n lines of n numbers) "
                   "or inline rows separated by ';'")
      ->required();
  estimate->add_option("--samples", samples, "sample count for the sampling methods");
  estimate->add_option("--abs-tol", abs_tol, "absolute tolerance for semianalytic");
  estimate->add_option("--seed", seed, "random seed");
  estimate->add_flag("--json", as_json, "print a JSON document");

  // compare
  auto* compare = app.add_subcommand(
      "compare", "run the multi-method comparison experiment");
  std::string dims_text = "2..3";
  int count = 100;
  std::string methods_text = "all";
  std::uint64_t master_seed = 0;
  std::string out_dir = "stg-out";
  bool force = false;
  long cmp_samples = stg::kDefaultRejectionTarget;
  double cmp_abs_tol = stg::kDefaultAbsTol;
  int thin_moments = 2;
  compare->add_option("--dims", dims_text, "dimensions, e.g. 2..5 or 2,4");
  compare->add_option("--count", count, "distributions per dimension");
  compare->add_option("--methods", methods_text,
                      "all or comma list of rejection,gessner,semianalytic");
  compare->add_option("--seed", master_seed, "master seed");
  compare->add_option("--out", out_dir, "output directory")->required();
  compare->add_option("--samples", cmp_samples, "sample count per method");
  compare->add_option("--abs-tol", cmp_abs_tol, "semianalytic tolerance");
  compare->add_option("--thin-moments", thin_moments,
                      "thinning ratio for the Gessner moment chain");
  compare->add_flag("--force", force, "allow dims beyond the method cutoffs");

  // sample-params
  auto* sample = app.add_subcommand(
      "sample-params", "draw experiment parameters and print them");
  int sp_dim = 2;
  int sp_count = 1;
  std::uint64_t sp_seed = 0;
  sample->add_option("--dim", sp_dim, "dimension")->required();
  sample->add_option("--count", sp_count, "number of draws");
  sample->add_option("--seed", sp_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) {
      const std::vector<double> mean_values = parse_number_list(mean_text);
      Eigen::VectorXd mean =
          Eigen::Map<const Eigen::VectorXd>(mean_values.data(),
                                            static_cast<long>(mean_values.size()));
      const Eigen::MatrixXd cov =
          parse_covariance(cov_spec, static_cast<int>(mean.size()));
      const stg::GaussianParams params = stg::validate_params(mean, cov);

      stg::TruncationSummary summary;
      if (method == stg::kMethodRejection) {
        stg::Rng rng(seed);
        summary = stg::estimate_rejection(params, samples,
                                          stg::kDefaultMaxTrials, rng);
      } else if (method == stg::kMethodGessner) {
        stg::GessnerConfig gc;
        gc.seed = seed;
        gc.m_hdr = samples;
        gc.m_moments = samples;
        summary = stg::estimate_gessner(params, gc);
      } else {
        summary = stg::estimate_semianalytic(params, abs_tol);
      }
      if (as_json) {
        std::cout << summary_to_json(summary).dump(2) << "\n";
      } else {
        print_summary_plain(summary);
      }
    } else if (compare->parsed()) {
      stg::ExperimentConfig config;
      config.dims = parse_dims(dims_text);
      config.count_per_dim = count;
      if (methods_text != "all") {
        config.methods.clear();
        std::stringstream in(methods_text);
        std::string m;
        while (std::getline(in, m, ',')) config.methods.push_back(m);
      }
      config.master_seed = master_seed;
      config.output_dir = out_dir;
      config.force = force;
      config.rejection_m_target = cmp_samples;
      config.gessner.m_hdr = cmp_samples;
      config.gessner.m_moments = cmp_samples;
      config.gessner.thin_moments = thin_moments;
      config.semianalytic_abs_tol = cmp_abs_tol;

      if (config.force) {
        for (const int dim : config.dims) {
          for (const auto& m : config.methods) {
            if (dim > stg::default_max_dim(m)) {
              std::cerr << "warning: running " << m << " at n=" << dim
                        << " beyond its default cutoff of "
                        << stg::default_max_dim(m) << "\n";
            }
          }
        }
      }

      const auto records = stg::run_comparison(config);
      stg::report(records, config.output_dir);
      std::cout << "wrote " << records.size() << " records to " << out_dir
                << "\n";
    } else if (sample->parsed()) {
      stg::Rng rng(sp_seed);
      for (int i = 0; i < sp_count; ++i) {
        const stg::GaussianParams params =
            stg::sample_experiment_params(sp_dim, rng);
        std::cout << "mean";
        for (int j = 0; j < sp_dim; ++j) {
          std::cout << ' ' << stg::format_double(params.mean[j]);
        }
        std::cout << "\ncov\n";
        for (int r = 0; r < sp_dim; ++r) {
          for (int c = 0; c < sp_dim; ++c) {
            std::cout << (c ? " " : "") << stg::format_double(params.cov(r, c));
          }
          std::cout << "\n";
        }
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
