#pragma once

#include <Eigen/Dense>

#include "stg/errors.hpp"

namespace stg {

/// Estimated integral, mean and covariance of a simplex-truncated MND,
/// plus per-method diagnostics (counts, standard errors, level
/// probabilities, wall time). Produced by the rejection, Gessner and
/// semi-analytical estimators.
struct TruncationSummary {
  double z = 0.0;
  double z_log = 0.0;
  Eigen::VectorXd mean_t;
  Eigen::MatrixXd cov_t;
  Diagnostics diagnostics;

  int dim() const { return static_cast<int>(mean_t.size()); }
};

}  // namespace stg
