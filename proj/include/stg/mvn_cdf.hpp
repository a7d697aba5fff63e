#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "stg/gaussian.hpp"
#include "stg/normal.hpp"

namespace stg {

/// Axis-aligned box a <= w <= b; entries may be -inf/+inf.
struct HyperRectangle {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  HyperRectangle(Eigen::VectorXd a, Eigen::VectorXd b);
  int dim() const { return static_cast<int>(lower.size()); }
};

/// Result of a rectangle-probability computation. abs_error is the
/// 3-sigma spread over the random lattice shifts; when the evaluation
/// budget runs out before abs_error reaches the requested tolerance the
/// estimate is still returned with its achieved error.
struct ProbEstimate {
  double value = 0.0;
  double abs_error = 0.0;
  long evaluations = 0;

  bool converged(double abs_tol) const { return abs_error <= abs_tol; }
};

inline constexpr double kDefaultAbsTol = 1e-4;
inline constexpr double kHighAccuracyAbsTol = 1e-6;

/// Fixed default seed for the lattice shift randomization; identical
/// calls return identical values.
inline constexpr std::uint64_t kQmcSeed = 0x6A09E667F3BCC908ull;

/// P(a <= X <= b) for X ~ N(mean, cov). n = 1 uses the closed form; n >= 2
/// uses Cholesky separation of variables with variable reordering and a
/// shift-randomized rank-1 lattice rule.
ProbEstimate rect_prob(const HyperRectangle& rect, const GaussianParams& params,
                       double abs_tol = kDefaultAbsTol,
                       std::uint64_t seed = kQmcSeed);

/// Zero-mean core used by the moment formulas; accepts any n >= 0 and a
/// raw covariance (coordinates that are unbounded on both sides are
/// marginalized out exactly before integration).
ProbEstimate rect_prob_zero_mean(const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b,
                                 const Eigen::MatrixXd& cov, double abs_tol,
                                 std::uint64_t seed = kQmcSeed);

}  // namespace stg
