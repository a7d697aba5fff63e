#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stg/rng.hpp"

namespace stg {

/// Mean and covariance of a non-truncated multivariate normal.
/// Construct through validate_params; the stored covariance is exactly
/// symmetric and strictly positive definite.
struct GaussianParams {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Lower-triangular L with L * L^T = cov, plus log|cov|.
struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double log_det = 0.0;

  int dim() const { return static_cast<int>(lower.rows()); }
};

// Relative eigenvalue floor for accepting a covariance as positive
// definite. Semi-definite inputs are rejected: every downstream formula
// needs the inverse.
inline constexpr double kEpsPositiveDefinite = 1e-10;

// Relative tolerance under which an asymmetric input is silently
// symmetrized as (S + S^T)/2.
inline constexpr double kSymmetryTolerance = 1e-8;

/// Validates dimensions, symmetry and positive definiteness; returns
/// params with the symmetrized covariance. n == 1 is rejected.
GaussianParams validate_params(const Eigen::VectorXd& mean,
                               const Eigen::MatrixXd& cov);

CholeskyFactor cholesky(const GaussianParams& params);

/// ln phi(x; mean, cov), evaluated through a Cholesky solve.
double log_density(const GaussianParams& params, const Eigen::VectorXd& x);

/// Draws `count` vectors x = mean + L z with z standard normal. Output is
/// fully determined by the rng seed.
std::vector<Eigen::VectorXd> sample_mvn(const CholeskyFactor& factor,
                                        const Eigen::VectorXd& mean, Rng& rng,
                                        long count);

/// Draws a single vector, appending to nothing; used by the samplers on
/// their hot paths.
Eigen::VectorXd sample_mvn_one(const CholeskyFactor& factor,
                               const Eigen::VectorXd& mean, Rng& rng);

}  // namespace stg
