#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stg/gaussian.hpp"
#include "stg/mvn_cdf.hpp"
#include "stg/summary.hpp"

namespace stg {

/// One inclusion-exclusion region: the intersection of the half-spaces
/// sliced off by the constraints named in `subset` (labels 1..n for
/// x_i < 0, label n+1 for sum(x) > 1), written as the linear truncation
/// c < T x < d with T full rank.
struct RegionTruncation {
  std::vector<int> subset;   // sorted labels in {1, ..., n+1}, size 1..n
  Eigen::MatrixXd t_matrix;  // n x n, rank n
  Eigen::VectorXd c_lower;   // entries finite or -inf
  Eigen::VectorXd d_upper;   // entries finite or +inf
};

/// Correlation quantities entering the bivariate marginal density of a
/// box-truncated MND: plain correlations, first-order partials given k
/// and given q, partial regression coefficients on (k, q), and the
/// second-order partial correlation matrix R_kq. Entries involving k or
/// q themselves are not defined by the formulas and are stored as 0 (1 on
/// diagonals); they are removed before use.
struct PartialCorrelationSet {
  Eigen::MatrixXd rho;
  Eigen::MatrixXd rho_cond1_k;  // rho_ij,k
  Eigen::MatrixXd rho_cond1_q;  // rho_ij,q
  Eigen::VectorXd beta_k;       // beta_ik,q: coefficient on w_k given q
  Eigen::VectorXd beta_q;       // beta_iq,k: coefficient on w_q given k
  Eigen::MatrixXd rho_cond2;    // rho_ij,kq
};

/// All non-empty subsets of {1, ..., n+1} of size <= n, ordered by size
/// then lexicographically. There are 2^(n+1) - 2 of them.
std::vector<std::vector<int>> index_subsets(int n);

/// Two-step construction of (T_v, c_v, d_v) for a subset v: start from
/// the identity with unbounded rows; a label v_i <= n sets d[v_i] = 0; the
/// label n+1 turns the smallest row j not in v into the all-ones row with
/// c[j] = 1.
RegionTruncation truncation_of(const std::vector<int>& subset,
                               const GaussianParams& params);

/// Phi_v: probability of the region under N(mu, Sigma), computed on the
/// transformed box (c - T mu, d - T mu) with covariance T Sigma T^T.
ProbEstimate region_integral(const RegionTruncation& region,
                             const GaussianParams& params, double abs_tol);

/// Mean E(W) of the box-truncated N(0, eps) on rect; terms at infinite
/// endpoints take their analytic limit 0.
Eigen::VectorXd rect_first_moment(const Eigen::MatrixXd& eps,
                                  const HyperRectangle& rect, double abs_tol);

/// k-th univariate marginal density of the box-truncated N(0, eps),
/// evaluated at finite w. The conditional covariance uses the Schur
/// complement of eps_kk.
double marginal_univariate(int k, double w, const Eigen::MatrixXd& eps,
                           const HyperRectangle& rect, double abs_tol);

/// Partial correlation structure for the pair (k, q), k != q.
PartialCorrelationSet partial_correlations(const Eigen::MatrixXd& eps, int k,
                                           int q);

/// (k, q) bivariate marginal density of the box-truncated N(0, eps) at
/// finite (w_k, w_q).
double marginal_bivariate(int k, int q, double w_k, double w_q,
                          const Eigen::MatrixXd& eps,
                          const HyperRectangle& rect, double abs_tol);

/// Second raw moment matrix E(W W^T) of the box-truncated N(0, eps).
Eigen::MatrixXd rect_second_moment(const Eigen::MatrixXd& eps,
                                   const HyperRectangle& rect, double abs_tol);

/// Deterministic Z, mean and covariance by inclusion-exclusion over all
/// 2^(n+1) - 2 regions. Cost grows with that region count; practical for
/// n <= 7.
TruncationSummary estimate_semianalytic(const GaussianParams& params,
                                        double abs_tol = kDefaultAbsTol);

}  // namespace stg
