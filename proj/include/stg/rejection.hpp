#pragma once

#include <Eigen/Dense>

#include "stg/gaussian.hpp"
#include "stg/summary.hpp"

namespace stg {

/// Membership test for the closed simplex domain: x_i >= 0 for all i and
/// sum(x) <= 1. Boundary points count as inside.
bool in_domain(const Eigen::VectorXd& x);

inline constexpr long kDefaultRejectionTarget = 10000;
inline constexpr long kDefaultMaxTrials = 100000000;

/// Draws from the non-truncated MND until m_target samples land in the
/// domain (or max_trials draws have been spent, which raises
/// AcceptanceTooLow with the partial counts). Z is estimated as
/// kept/total; moments are the sample mean and covariance (m-1
/// denominator) of the kept draws.
TruncationSummary estimate_rejection(const GaussianParams& params,
                                     long m_target, long max_trials, Rng& rng);

}  // namespace stg
