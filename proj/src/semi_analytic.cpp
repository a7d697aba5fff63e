#include "stg/semi_analytic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "stg/errors.hpp"
#include "stg/normal.hpp"

namespace stg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Regions whose probability falls below this fraction of the requested
// tolerance contribute nothing detectable to the moment sums.
constexpr double kRegionSkipFactor = 1e-4;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Numerator of the k-th univariate marginal density: the normal density
// at w times the (n-1)-dimensional box probability of the conditional
// distribution (Schur complement). The 1/Phi(a,b) normalizer is left to
// the caller so that region assembly can multiply it back out.
double univariate_numerator(int k, double w, const Eigen::MatrixXd& eps,
                            const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                            double abs_tol, long& phi_calls) {
  const int n = static_cast<int>(eps.rows());
  const double density = normal_pdf_var(w, eps(k, k));
  if (n == 1) return density;

  Eigen::VectorXd col(n - 1), ra(n - 1), rb(n - 1);
  Eigen::MatrixXd sub(n - 1, n - 1);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (i == k) continue;
    col[r] = eps(i, k);
    ra[r] = std::isinf(a[i]) ? a[i] : a[i] - w * eps(i, k) / eps(k, k);
    rb[r] = std::isinf(b[i]) ? b[i] : b[i] - w * eps(i, k) / eps(k, k);
    int c = 0;
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      sub(r, c++) = eps(i, j);
    }
    ++r;
  }
  const Eigen::MatrixXd schur =
      symmetrized(sub - col * col.transpose() / eps(k, k));
  if (Eigen::LLT<Eigen::MatrixXd>(schur).info() != Eigen::Success) {
    throw NearSingularCorrelation(
        "conditional covariance is not positive definite");
  }
  ++phi_calls;
  return density * rect_prob_zero_mean(ra, rb, schur, abs_tol).value;
}

// Numerator of the (k, q) bivariate marginal density. For n = 2 it is
// just the bivariate normal density; for n >= 3 the remaining
// coordinates are standardized and conditioned through the partial
// correlation matrix R_kq.
double bivariate_numerator(int k, int q, double wk, double wq,
                           const Eigen::MatrixXd& eps,
                           const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                           double abs_tol, long& phi_calls) {
  const int n = static_cast<int>(eps.rows());
  if (n == 2) {
    Eigen::Matrix2d e2 = eps;
    const double w1 = k == 0 ? wk : wq;
    const double w2 = k == 0 ? wq : wk;
    return binormal_pdf(w1, w2, e2);
  }

  const PartialCorrelationSet pc = partial_correlations(eps, k, q);
  Eigen::Matrix2d block;
  block << eps(k, k), eps(k, q), eps(q, k), eps(q, q);
  const double density = binormal_pdf(wk, wq, block);

  const double zk = wk / std::sqrt(eps(k, k));
  const double zq = wq / std::sqrt(eps(q, q));
  Eigen::VectorXd sa(n - 2), sb(n - 2);
  Eigen::MatrixXd corr(n - 2, n - 2);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (i == k || i == q) continue;
    const double var_part = (1.0 - pc.rho(i, q) * pc.rho(i, q)) *
                            (1.0 - pc.rho_cond1_q(i, k) * pc.rho_cond1_q(i, k));
    if (var_part <= 1e-12) {
      throw NearSingularCorrelation(
          "conditional standard deviation vanished in bivariate marginal");
    }
    const double denom = std::sqrt(var_part);
    const double center = pc.beta_k[i] * zk + pc.beta_q[i] * zq;
    const double si = std::sqrt(eps(i, i));
    sa[r] = std::isinf(a[i]) ? a[i] : (a[i] / si - center) / denom;
    sb[r] = std::isinf(b[i]) ? b[i] : (b[i] / si - center) / denom;
    int c = 0;
    for (int j = 0; j < n; ++j) {
      if (j == k || j == q) continue;
      corr(r, c++) = i == j ? 1.0 : pc.rho_cond2(i, j);
    }
    ++r;
  }
  ++phi_calls;
  return density * rect_prob_zero_mean(sa, sb, corr, abs_tol).value;
}

// Shared endpoint tables for the moment formulas of one box. All values
// are numerators (un-normalized); entries at infinite endpoints stay 0,
// their analytic limit.
struct EndpointTable {
  Eigen::VectorXd g_at_a;   // G_k(a_k)
  Eigen::VectorXd g_at_b;   // G_k(b_k)
  Eigen::MatrixXd g_pairs;  // sum of signed corner values, k < q
  long phi_calls = 0;
};

EndpointTable univariate_endpoints(const Eigen::MatrixXd& eps,
                                   const Eigen::VectorXd& a,
                                   const Eigen::VectorXd& b, double abs_tol) {
  const int n = static_cast<int>(eps.rows());
  EndpointTable t;
  t.g_at_a = Eigen::VectorXd::Zero(n);
  t.g_at_b = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (!std::isinf(a[k])) {
      t.g_at_a[k] =
          univariate_numerator(k, a[k], eps, a, b, abs_tol, t.phi_calls);
    }
    if (!std::isinf(b[k])) {
      t.g_at_b[k] =
          univariate_numerator(k, b[k], eps, a, b, abs_tol, t.phi_calls);
    }
  }
  return t;
}

void add_bivariate_endpoints(EndpointTable& t, const Eigen::MatrixXd& eps,
                             const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             double abs_tol) {
  const int n = static_cast<int>(eps.rows());
  t.g_pairs = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int q = k + 1; q < n; ++q) {
      double sum = 0.0;
      const double ends_k[2] = {a[k], b[k]};
      const double ends_q[2] = {a[q], b[q]};
      const double signs[2] = {1.0, -1.0};
      for (int sk = 0; sk < 2; ++sk) {
        for (int sq = 0; sq < 2; ++sq) {
          if (std::isinf(ends_k[sk]) || std::isinf(ends_q[sq])) continue;
          const double sign = signs[sk] * signs[sq];  // ++/-- add, +-/-+ sub
          sum += sign * bivariate_numerator(k, q, ends_k[sk], ends_q[sq], eps,
                                            a, b, abs_tol, t.phi_calls);
        }
      }
      t.g_pairs(k, q) = sum;
    }
  }
}

// Phi_v * E(W_i): first-moment numerators from the endpoint table.
Eigen::VectorXd first_moment_numerator(const Eigen::MatrixXd& eps,
                                       const EndpointTable& t) {
  return eps * (t.g_at_a - t.g_at_b);
}

// Phi_v * E(W_i W_j): second-moment numerators. `phi` is the box
// probability multiplying the leading eps_ij term.
Eigen::MatrixXd second_moment_numerator(const Eigen::MatrixXd& eps,
                                        const Eigen::VectorXd& a,
                                        const Eigen::VectorXd& b, double phi,
                                        const EndpointTable& t) {
  const int n = static_cast<int>(eps.rows());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double value = eps(i, j) * phi;
      for (int k = 0; k < n; ++k) {
        double term = 0.0;
        if (!std::isinf(a[k])) term += a[k] * t.g_at_a[k];
        if (!std::isinf(b[k])) term -= b[k] * t.g_at_b[k];
        value += eps(i, k) * eps(j, k) / eps(k, k) * term;
      }
      for (int k = 0; k < n; ++k) {
        for (int q = k + 1; q < n; ++q) {
          if (t.g_pairs(k, q) == 0.0) continue;
          const double bracket =
              eps(i, k) / eps(k, k) *
                  (eps(k, k) * eps(j, q) - eps(k, q) * eps(j, k)) +
              eps(i, q) / eps(q, q) *
                  (eps(q, q) * eps(j, k) - eps(q, k) * eps(j, q));
          value += bracket * t.g_pairs(k, q);
        }
      }
      out(i, j) = value;
      out(j, i) = value;
    }
  }
  return out;
}

double checked_denominator(const Eigen::MatrixXd& eps,
                           const HyperRectangle& rect, double abs_tol,
                           long& phi_calls) {
  ++phi_calls;
  const double denom =
      rect_prob_zero_mean(rect.lower, rect.upper, eps, abs_tol).value;
  if (denom <= 0.0) {
    throw ZeroIntegral("box probability is zero; moments are undefined",
                       {{"denominator", denom}});
  }
  return denom;
}

}  // namespace

std::vector<std::vector<int>> index_subsets(int n) {
  if (n < 2) {
    throw DimensionMismatch("index subsets require n >= 2");
  }
  std::vector<std::vector<int>> out;
  const int labels = n + 1;
  for (int size = 1; size <= n; ++size) {
    std::vector<int> pick(size);
    for (int i = 0; i < size; ++i) pick[i] = i + 1;
    while (true) {
      out.push_back(pick);
      int i = size - 1;
      while (i >= 0 && pick[i] == labels - size + 1 + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

RegionTruncation truncation_of(const std::vector<int>& subset,
                               const GaussianParams& params) {
  const int n = params.dim();
  if (subset.empty() || static_cast<int>(subset.size()) > n) {
    throw Error(ErrorKind::validation, "subset size must be in [1, n]");
  }
  RegionTruncation region;
  region.subset = subset;
  std::sort(region.subset.begin(), region.subset.end());
  region.t_matrix = Eigen::MatrixXd::Identity(n, n);
  region.c_lower = Eigen::VectorXd::Constant(n, -kInf);
  region.d_upper = Eigen::VectorXd::Constant(n, kInf);

  for (const int label : region.subset) {
    if (label < 1 || label > n + 1) {
      throw Error(ErrorKind::validation, "subset label out of range");
    }
    if (label <= n) {
      region.d_upper[label - 1] = 0.0;  // slice off x_label < 0
    } else {
      // Slice off sum(x) > 1 through the smallest row not named in v.
      int j = 1;
      while (std::binary_search(region.subset.begin(), region.subset.end(),
                                j)) {
        ++j;
      }
      region.t_matrix.row(j - 1) = Eigen::RowVectorXd::Ones(n);
      region.c_lower[j - 1] = 1.0;
    }
  }
  return region;
}

ProbEstimate region_integral(const RegionTruncation& region,
                             const GaussianParams& params, double abs_tol) {
  const Eigen::MatrixXd eps = symmetrized(
      region.t_matrix * params.cov * region.t_matrix.transpose());
  const Eigen::VectorXd shift = region.t_matrix * params.mean;
  Eigen::VectorXd a = region.c_lower;
  Eigen::VectorXd b = region.d_upper;
  for (int i = 0; i < a.size(); ++i) {
    if (!std::isinf(a[i])) a[i] -= shift[i];
    if (!std::isinf(b[i])) b[i] -= shift[i];
  }
  return rect_prob_zero_mean(a, b, eps, abs_tol);
}

Eigen::VectorXd rect_first_moment(const Eigen::MatrixXd& eps,
                                  const HyperRectangle& rect, double abs_tol) {
  if (eps.rows() != rect.dim()) {
    throw DimensionMismatch("covariance and rectangle dimensions disagree");
  }
  long phi_calls = 0;
  const double denom = checked_denominator(eps, rect, abs_tol, phi_calls);
  const EndpointTable t =
      univariate_endpoints(eps, rect.lower, rect.upper, abs_tol);
  return first_moment_numerator(eps, t) / denom;
}

double marginal_univariate(int k, double w, const Eigen::MatrixXd& eps,
                           const HyperRectangle& rect, double abs_tol) {
  if (eps.rows() != rect.dim()) {
    throw DimensionMismatch("covariance and rectangle dimensions disagree");
  }
  if (k < 0 || k >= rect.dim() || !std::isfinite(w)) {
    throw Error(ErrorKind::validation, "marginal index/point out of range");
  }
  long phi_calls = 0;
  const double denom = checked_denominator(eps, rect, abs_tol, phi_calls);
  return univariate_numerator(k, w, eps, rect.lower, rect.upper, abs_tol,
                              phi_calls) /
         denom;
}

PartialCorrelationSet partial_correlations(const Eigen::MatrixXd& eps, int k,
                                           int q) {
  const int n = static_cast<int>(eps.rows());
  if (k == q || k < 0 || q < 0 || k >= n || q >= n) {
    throw Error(ErrorKind::validation, "need two distinct indices");
  }
  PartialCorrelationSet pc;
  pc.rho.setIdentity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) pc.rho(i, j) = eps(i, j) / std::sqrt(eps(i, i) * eps(j, j));
    }
  }

  const auto first_order = [&](int m) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || i == m || j == m) continue;
        const double di = 1.0 - pc.rho(i, m) * pc.rho(i, m);
        const double dj = 1.0 - pc.rho(j, m) * pc.rho(j, m);
        if (di <= 1e-12 || dj <= 1e-12) {
          throw NearSingularCorrelation(
              "first-order partial correlation denominator vanished");
        }
        out(i, j) = (pc.rho(i, j) - pc.rho(i, m) * pc.rho(j, m)) /
                    std::sqrt(di * dj);
      }
    }
    return out;
  };
  pc.rho_cond1_k = first_order(k);
  pc.rho_cond1_q = first_order(q);

  pc.beta_k = Eigen::VectorXd::Zero(n);
  pc.beta_q = Eigen::VectorXd::Zero(n);
  const double dkq = 1.0 - pc.rho(k, q) * pc.rho(k, q);
  if (dkq <= 1e-12) {
    throw NearSingularCorrelation("conditioning pair is nearly collinear");
  }
  for (int i = 0; i < n; ++i) {
    if (i == k || i == q) continue;
    pc.beta_k[i] = (pc.rho(i, k) - pc.rho(i, q) * pc.rho(k, q)) / dkq;
    pc.beta_q[i] = (pc.rho(i, q) - pc.rho(i, k) * pc.rho(q, k)) / dkq;
  }

  pc.rho_cond2 = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || i == k || i == q || j == k || j == q) continue;
      const double di = 1.0 - pc.rho_cond1_k(i, q) * pc.rho_cond1_k(i, q);
      const double dj = 1.0 - pc.rho_cond1_k(j, q) * pc.rho_cond1_k(j, q);
      if (di <= 1e-12 || dj <= 1e-12) {
        throw NearSingularCorrelation(
            "second-order partial correlation denominator vanished");
      }
      pc.rho_cond2(i, j) = (pc.rho_cond1_k(i, j) -
                            pc.rho_cond1_k(i, q) * pc.rho_cond1_k(j, q)) /
                           std::sqrt(di * dj);
    }
  }
  return pc;
}

double marginal_bivariate(int k, int q, double w_k, double w_q,
                          const Eigen::MatrixXd& eps,
                          const HyperRectangle& rect, double abs_tol) {
  if (eps.rows() != rect.dim()) {
    throw DimensionMismatch("covariance and rectangle dimensions disagree");
  }
  if (k == q || std::min(k, q) < 0 || std::max(k, q) >= rect.dim() ||
      !std::isfinite(w_k) || !std::isfinite(w_q)) {
    throw Error(ErrorKind::validation,
                "need distinct in-range indices and finite evaluation points");
  }
  long phi_calls = 0;
  const double denom = checked_denominator(eps, rect, abs_tol, phi_calls);
  return bivariate_numerator(k, q, w_k, w_q, eps, rect.lower, rect.upper,
                             abs_tol, phi_calls) /
         denom;
}

Eigen::MatrixXd rect_second_moment(const Eigen::MatrixXd& eps,
                                   const HyperRectangle& rect,
                                   double abs_tol) {
  if (eps.rows() != rect.dim()) {
    throw DimensionMismatch("covariance and rectangle dimensions disagree");
  }
  long phi_calls = 0;
  const double denom = checked_denominator(eps, rect, abs_tol, phi_calls);
  EndpointTable t = univariate_endpoints(eps, rect.lower, rect.upper, abs_tol);
  add_bivariate_endpoints(t, eps, rect.lower, rect.upper, abs_tol);
  return second_moment_numerator(eps, rect.lower, rect.upper, denom, t) /
         denom;
}

TruncationSummary estimate_semianalytic(const GaussianParams& params,
                                        double abs_tol) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = params.dim();
  const auto subsets = index_subsets(n);
  const double n_terms = static_cast<double>(subsets.size());

  // Compensated accumulation of Z; cancellation across the signed region
  // probabilities is exactly what destroys pathological cases.
  double z_sum = 1.0, z_comp = 0.0;
  const auto add_z = [&](double term) {
    const double y = term - z_comp;
    const double t = z_sum + y;
    z_comp = (t - z_sum) - y;
    z_sum = t;
  };

  Eigen::VectorXd mean_sum = params.mean;  // sign * Phi_v * mu_{i,v} terms
  Eigen::MatrixXd second_sum =
      params.mean * params.mean.transpose() + params.cov;  // mu_ij leading term
  double err_z = 0.0;
  long phi_calls_total = 0;

  for (const auto& subset : subsets) {
    const RegionTruncation region = truncation_of(subset, params);
    const Eigen::MatrixXd eps = symmetrized(
        region.t_matrix * params.cov * region.t_matrix.transpose());
    const Eigen::VectorXd shift = region.t_matrix * params.mean;
    Eigen::VectorXd a = region.c_lower;
    Eigen::VectorXd b = region.d_upper;
    for (int i = 0; i < n; ++i) {
      if (!std::isinf(a[i])) a[i] -= shift[i];
      if (!std::isinf(b[i])) b[i] -= shift[i];
    }

    ++phi_calls_total;
    const ProbEstimate phi = rect_prob_zero_mean(a, b, eps, abs_tol);
    const double sign = subset.size() % 2 == 1 ? -1.0 : 1.0;
    add_z(sign * phi.value);
    err_z += phi.abs_error;
    if (phi.value <= kRegionSkipFactor * abs_tol) continue;

    EndpointTable t = univariate_endpoints(eps, a, b, abs_tol);
    add_bivariate_endpoints(t, eps, a, b, abs_tol);
    phi_calls_total += t.phi_calls;

    const Eigen::VectorXd ew_num = first_moment_numerator(eps, t);
    const Eigen::MatrixXd eww_num =
        second_moment_numerator(eps, a, b, phi.value, t);

    // Back to x-space: x = T^{-1} w + mu. Everything is carried as
    // Phi_v-weighted numerators so tiny regions never divide by ~0.
    const Eigen::MatrixXd t_inv = region.t_matrix.inverse();
    const Eigen::VectorXd tw = t_inv * ew_num;
    mean_sum += sign * (phi.value * params.mean + tw);
    second_sum += sign * (phi.value * params.mean * params.mean.transpose() +
                          params.mean * tw.transpose() +
                          tw * params.mean.transpose() +
                          t_inv * eww_num * t_inv.transpose());
  }

  const double z = z_sum;
  if (z <= abs_tol * n_terms) {
    throw ZeroIntegral(
        "inclusion-exclusion cancellation left no significant digits in Z",
        {{"z", z}, {"abs_tol", abs_tol}, {"terms", n_terms}});
  }

  TruncationSummary out;
  out.z = z;
  out.z_log = std::log(z);
  out.mean_t = mean_sum / z;
  const Eigen::MatrixXd raw_second = second_sum / z;
  out.cov_t = symmetrized(raw_second - out.mean_t * out.mean_t.transpose());

  out.diagnostics["phi_calls_regions"] = n_terms;
  out.diagnostics["phi_calls_total"] = static_cast<double>(phi_calls_total);
  out.diagnostics["abs_tol"] = abs_tol;
  out.diagnostics["err_z"] = err_z;
  // Deterministic method: comparisons against sampling methods use the
  // tolerance as the error scale.
  out.diagnostics["se_z"] = std::max(err_z, abs_tol);
  for (int i = 0; i < n; ++i) {
    out.diagnostics["se_mean_" + std::to_string(i)] = abs_tol;
    for (int j = i; j < n; ++j) {
      out.diagnostics["se_cov_" + std::to_string(i) + "_" +
                      std::to_string(j)] = abs_tol;
    }
  }
  out.diagnostics["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace stg
