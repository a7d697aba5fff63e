#include "stg/mvn_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stg/errors.hpp"
#include "stg/rng.hpp"

namespace stg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rank-1 lattice ladder. Generating vectors are Korobov, z_j = a^j mod n;
// the parameters below were selected by a P2 search in the weighted
// Korobov space (alpha = 2, product weights 1/j^2, 16 dimensions).
struct LatticeRule {
  long n;
  long a;
};
constexpr LatticeRule kLadder[] = {
    {127, 44},    {251, 71},    {509, 130},    {1021, 228},
    {2039, 885},  {4093, 1074}, {8191, 541},   {16381, 6585},
    {32749, 8237}, {65521, 16856}, {131071, 22279},
};
constexpr int kShifts = 8;

double safe_cdf_ratio(double bound, double offset, double scale) {
  if (std::isinf(bound)) return bound > 0 ? 1.0 : 0.0;
  return normal_cdf((bound - offset) / scale);
}

// Reordered Cholesky form of the separation-of-variables integrand.
struct SovProblem {
  Eigen::MatrixXd chol;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  int dim = 0;
  double d_first = 0.0;
  double p_first = 0.0;  // probability width of the first variable
};

// Greedy variable ordering (smallest expected truncated range first)
// interleaved with the Cholesky factorization, following Genz's scheme.
// Expected values of the truncated inner variables steer later choices.
SovProblem prepare_sov(Eigen::VectorXd a, Eigen::VectorXd b,
                       Eigen::MatrixXd s) {
  const int m = static_cast<int>(a.size());
  SovProblem p;
  p.chol = Eigen::MatrixXd::Zero(m, m);
  p.dim = m;
  Eigen::VectorXd y_exp = Eigen::VectorXd::Zero(m);

  for (int i = 0; i < m; ++i) {
    int best = i;
    double best_width = 2.0;
    for (int j = i; j < m; ++j) {
      double s2 = s(j, j);
      double t = 0.0;
      for (int l = 0; l < i; ++l) {
        s2 -= p.chol(j, l) * p.chol(j, l);
        t += p.chol(j, l) * y_exp[l];
      }
      const double sd = std::sqrt(std::max(s2, 1e-300));
      const double width =
          safe_cdf_ratio(b[j], t, sd) - safe_cdf_ratio(a[j], t, sd);
      if (width < best_width) {
        best_width = width;
        best = j;
      }
    }
    if (best != i) {
      std::swap(a[i], a[best]);
      std::swap(b[i], b[best]);
      s.row(i).swap(s.row(best));
      s.col(i).swap(s.col(best));
      for (int l = 0; l < i; ++l) std::swap(p.chol(i, l), p.chol(best, l));
    }

    double s2 = s(i, i);
    for (int l = 0; l < i; ++l) s2 -= p.chol(i, l) * p.chol(i, l);
    const double cii = std::sqrt(std::max(s2, 0.0));
    p.chol(i, i) = cii;
    if (cii > 0.0) {
      for (int j = i + 1; j < m; ++j) {
        double v = s(j, i);
        for (int l = 0; l < i; ++l) v -= p.chol(i, l) * p.chol(j, l);
        p.chol(j, i) = v / cii;
      }
    }

    double t = 0.0;
    for (int l = 0; l < i; ++l) t += p.chol(i, l) * y_exp[l];
    const double sd = cii > 0.0 ? cii : 1e-300;
    const double lo = std::isinf(a[i]) ? -kInf : (a[i] - t) / sd;
    const double hi = std::isinf(b[i]) ? kInf : (b[i] - t) / sd;
    const double width = normal_cdf(hi) - normal_cdf(lo);
    if (width > 1e-300) {
      const double phi_lo = std::isinf(lo) ? 0.0 : normal_pdf(lo);
      const double phi_hi = std::isinf(hi) ? 0.0 : normal_pdf(hi);
      y_exp[i] = (phi_lo - phi_hi) / width;
    } else {
      const double flo = std::isinf(lo) ? -8.0 : lo;
      const double fhi = std::isinf(hi) ? 8.0 : hi;
      y_exp[i] = 0.5 * (flo + fhi);
    }
  }

  const double c00 = std::max(p.chol(0, 0), 1e-300);
  p.d_first = safe_cdf_ratio(a[0], 0.0, c00);
  p.p_first = safe_cdf_ratio(b[0], 0.0, c00) - p.d_first;
  p.a = std::move(a);
  p.b = std::move(b);
  return p;
}

double clamp_prob(double x) {
  return std::min(std::max(x, 1e-300), 1.0 - 1e-16);
}

// Integrand over the unit cube [0,1]^{m-1}.
double sov_integrand(const SovProblem& p, const double* u,
                     std::vector<double>& y) {
  double f = p.p_first;
  double d = p.d_first;
  double e = p.d_first + p.p_first;
  for (int i = 1; i < p.dim; ++i) {
    y[i - 1] = inverse_normal_cdf(clamp_prob(d + u[i - 1] * (e - d)));
    double t = 0.0;
    for (int l = 0; l < i; ++l) t += p.chol(i, l) * y[l];
    const double cii = std::max(p.chol(i, i), 1e-300);
    d = safe_cdf_ratio(p.a[i], t, cii);
    e = safe_cdf_ratio(p.b[i], t, cii);
    f *= std::max(e - d, 0.0);
    if (f == 0.0) return 0.0;
  }
  return f;
}

}  // namespace

HyperRectangle::HyperRectangle(Eigen::VectorXd a, Eigen::VectorXd b)
    : lower(std::move(a)), upper(std::move(b)) {
  if (lower.size() != upper.size()) {
    throw DimensionMismatch("rectangle bounds have different lengths");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw Error(ErrorKind::validation,
                  "rectangle requires lower < upper in every coordinate");
    }
  }
}

ProbEstimate rect_prob_zero_mean(const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b,
                                 const Eigen::MatrixXd& cov, double abs_tol,
                                 std::uint64_t seed) {
  if (a.size() != b.size() || cov.rows() != a.size() ||
      cov.cols() != a.size()) {
    throw DimensionMismatch("bounds/covariance dimensions disagree");
  }

  // Coordinates free on both sides integrate to 1: marginalize them away.
  std::vector<int> keep;
  for (int i = 0; i < a.size(); ++i) {
    if (!(std::isinf(a[i]) && a[i] < 0 && std::isinf(b[i]) && b[i] > 0)) {
      keep.push_back(i);
    }
  }
  const int m = static_cast<int>(keep.size());
  if (m == 0) return {1.0, 0.0, 0};

  Eigen::VectorXd ra(m), rb(m);
  Eigen::MatrixXd rs(m, m);
  for (int i = 0; i < m; ++i) {
    ra[i] = a[keep[i]];
    rb[i] = b[keep[i]];
    for (int j = 0; j < m; ++j) rs(i, j) = cov(keep[i], keep[j]);
  }

  if (m == 1) {
    const double sd = std::sqrt(rs(0, 0));
    const double v = safe_cdf_ratio(rb[0], 0.0, sd) - safe_cdf_ratio(ra[0], 0.0, sd);
    return {std::clamp(v, 0.0, 1.0), 1e-15, 2};
  }

  SovProblem prob = prepare_sov(std::move(ra), std::move(rb), std::move(rs));
  if (prob.p_first <= 1e-300) return {0.0, 1e-300, 0};

  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(m)));
  const int d = m - 1;
  std::vector<double> y(static_cast<std::size_t>(d));
  std::vector<double> pt(static_cast<std::size_t>(d));
  std::vector<double> shift(static_cast<std::size_t>(d));
  std::vector<long> z(static_cast<std::size_t>(d));
  std::vector<long> k(static_cast<std::size_t>(d));

  ProbEstimate est;
  for (const LatticeRule& rule : kLadder) {
    z[0] = 1 % rule.n;
    for (int j = 1; j < d; ++j) {
      z[j] = static_cast<long>(
          (static_cast<unsigned long long>(z[j - 1]) *
           static_cast<unsigned long long>(rule.a)) %
          static_cast<unsigned long long>(rule.n));
    }
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < kShifts; ++s) {
      for (int j = 0; j < d; ++j) {
        shift[j] = rng.uniform();
        k[j] = 0;
      }
      double acc = 0.0;
      for (long i = 0; i < rule.n; ++i) {
        for (int j = 0; j < d; ++j) {
          double x = static_cast<double>(k[j]) / static_cast<double>(rule.n) +
                     shift[j];
          if (x >= 1.0) x -= 1.0;
          pt[j] = std::fabs(2.0 * x - 1.0);  // baker transform
          k[j] += z[j];
          if (k[j] >= rule.n) k[j] -= rule.n;
        }
        acc += sov_integrand(prob, pt.data(), y);
      }
      const double mean = acc / static_cast<double>(rule.n);
      sum += mean;
      sum2 += mean * mean;
    }
    est.evaluations += kShifts * rule.n;
    est.value = sum / kShifts;
    const double var =
        std::max(sum2 / kShifts - est.value * est.value, 0.0) *
        kShifts / (kShifts - 1.0);
    est.abs_error = 3.0 * std::sqrt(var / kShifts);
    if (est.abs_error <= abs_tol) break;
  }
  est.value = std::clamp(est.value, 0.0, 1.0);
  return est;
}

ProbEstimate rect_prob(const HyperRectangle& rect, const GaussianParams& params,
                       double abs_tol, std::uint64_t seed) {
  if (rect.dim() != params.dim()) {
    throw DimensionMismatch("rectangle and parameter dimensions disagree");
  }
  if (!(abs_tol >= 1e-8 && abs_tol <= 1e-2)) {
    throw Error(ErrorKind::validation, "abs_tol must lie in [1e-8, 1e-2]");
  }
  // Shift to zero mean; infinities survive the subtraction.
  return rect_prob_zero_mean(rect.lower - params.mean,
                             rect.upper - params.mean, params.cov, abs_tol,
                             seed);
}

}  // namespace stg
