#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stg/gaussian.hpp"

namespace stg {

/// Linear domain constraints A*y + c >= 0 in mean-centered coordinates.
struct LinearConstraints {
  Eigen::MatrixXd a_matrix;
  Eigen::VectorXd c_vector;

  LinearConstraints(Eigen::MatrixXd a, Eigen::VectorXd c);
  int rows() const { return static_cast<int>(a_matrix.rows()); }
  int dim() const { return static_cast<int>(a_matrix.cols()); }
};

/// Angle intervals [lo, hi) of one ellipse revolution lying inside a
/// constrained domain. Intervals are disjoint and ordered; their union is
/// parameterized over [theta_min, theta_min + 2*pi).
struct ArcSet {
  std::vector<std::pair<double, double>> intervals;
  double total_measure = 0.0;
};

/// The (n+1) simplex constraints of Eq. A = [-1 row; I_n],
/// c = [1 - sum(mu); mu].
LinearConstraints simplex_constraints(const GaussianParams& params);

/// Loosens every constraint by gamma >= 0: c' = c + gamma.
LinearConstraints shifted_constraints(const LinearConstraints& base,
                                      double gamma);

/// Point on the ellipse through y_t and nu: y_t cos(theta) + nu sin(theta).
Eigen::VectorXd ellipse_point(const Eigen::VectorXd& y_t,
                              const Eigen::VectorXd& nu, double theta);

/// Angles in [0, 2*pi) where the ellipse crosses constraint row
/// a_row.y + c_i = 0. Returns zero, one (exact tangency) or two angles.
/// Near-tangential crossings (relative gap below 1e-12) are treated as
/// non-intersecting; the sliver arc has no practical measure.
std::vector<double> constraint_intersections(const Eigen::VectorXd& a_row,
                                             double c_i,
                                             const Eigen::VectorXd& y_t,
                                             const Eigen::VectorXd& nu);

/// All arcs of the ellipse inside the domain. y_t must satisfy the
/// constraints strictly; the arc containing theta = 0 always survives.
ArcSet active_arcs(const LinearConstraints& constraints,
                   const Eigen::VectorXd& y_t, const Eigen::VectorXd& nu);

/// One LIN-ESS transition: sample nu ~ N(0, Sigma), pick theta uniformly
/// over the active arcs (length-proportional across intervals), move.
/// Acceptance is 100% by construction.
Eigen::VectorXd liness_step(const LinearConstraints& constraints,
                            const CholeskyFactor& factor,
                            const Eigen::VectorXd& y_t, Rng& rng);

/// Runs burn_in + count*thin steps from y0 and returns every thin-th
/// post-burn-in state.
std::vector<Eigen::VectorXd> sample_liness(const LinearConstraints& constraints,
                                           const CholeskyFactor& factor,
                                           const Eigen::VectorXd& y0,
                                           long count, int thin, long burn_in,
                                           Rng& rng);

/// Deterministic feasible start: y = x_c - mu with x_c the simplex
/// centroid (1/(n+1), ..., 1/(n+1)); every constraint margin equals
/// 1/(n+1) regardless of mu. Follow with burn-in.
Eigen::VectorXd initial_point(const GaussianParams& params);

/// Burn-in convention used when a chain starts from initial_point.
inline long default_burn_in(int thin) { return 50L * thin; }

}  // namespace stg
