#include "stg/liness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stg/errors.hpp"

namespace stg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  return theta;
}

bool satisfies_all(const LinearConstraints& constraints,
                   const Eigen::VectorXd& y) {
  return ((constraints.a_matrix * y + constraints.c_vector).array() >= 0.0)
      .all();
}

}  // namespace

LinearConstraints::LinearConstraints(Eigen::MatrixXd a, Eigen::VectorXd c)
    : a_matrix(std::move(a)), c_vector(std::move(c)) {
  if (a_matrix.rows() != c_vector.size() || a_matrix.rows() < 1) {
    throw DimensionMismatch("constraint matrix rows must match c length");
  }
  for (Eigen::Index i = 0; i < a_matrix.rows(); ++i) {
    if (a_matrix.row(i).cwiseAbs().maxCoeff() == 0.0) {
      throw Error(ErrorKind::validation,
                  "constraint row " + std::to_string(i) + " is all zero");
    }
  }
}

LinearConstraints simplex_constraints(const GaussianParams& params) {
  const int n = params.dim();
  Eigen::MatrixXd a(n + 1, n);
  a.row(0) = Eigen::RowVectorXd::Constant(n, -1.0);
  a.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd c(n + 1);
  c[0] = 1.0 - params.mean.sum();
  c.tail(n) = params.mean;
  return {std::move(a), std::move(c)};
}

LinearConstraints shifted_constraints(const LinearConstraints& base,
                                      double gamma) {
  if (gamma < 0.0) {
    throw NegativeShift("shift gamma must be non-negative, got " +
                        std::to_string(gamma));
  }
  return {base.a_matrix,
          base.c_vector + Eigen::VectorXd::Constant(base.rows(), gamma)};
}

Eigen::VectorXd ellipse_point(const Eigen::VectorXd& y_t,
                              const Eigen::VectorXd& nu, double theta) {
  if (y_t.size() != nu.size()) {
    throw DimensionMismatch("ellipse generators have different lengths");
  }
  return y_t * std::cos(theta) + nu * std::sin(theta);
}

std::vector<double> constraint_intersections(const Eigen::VectorXd& a_row,
                                             double c_i,
                                             const Eigen::VectorXd& y_t,
                                             const Eigen::VectorXd& nu) {
  const double ay = a_row.dot(y_t);
  const double an = a_row.dot(nu);
  const double r = std::hypot(ay, an);
  if (r == 0.0) {
    if (c_i == 0.0) {
      throw DegenerateEllipse(
          "constraint row orthogonal to both ellipse generators");
    }
    return {};  // constraint is constant along the ellipse
  }
  const double abs_c = std::fabs(c_i);
  if (abs_c > r) return {};

  // Acute reference angles, then quadrant corrections.
  const double alpha1_star = std::atan(std::fabs(an / ay));  // ay=0 -> pi/2
  double alpha1;
  if (ay < 0.0 && an < 0.0) {
    alpha1 = -std::numbers::pi + alpha1_star;
  } else if (ay >= 0.0 && an < 0.0) {
    alpha1 = -alpha1_star;
  } else if (ay >= 0.0 && an >= 0.0) {
    alpha1 = alpha1_star;
  } else {
    alpha1 = std::numbers::pi - alpha1_star;
  }

  if (abs_c == r) {
    // Exact tangency: alpha2 is 0 or pi, the two roots coincide.
    const double alpha2 = c_i > 0.0 ? std::numbers::pi : 0.0;
    return {wrap_angle(alpha1 + alpha2)};
  }
  if (r - abs_c < 1e-12 * r) return {};  // near-tangent sliver

  const double alpha2_star = std::acos(abs_c / r);
  const double alpha2 =
      c_i > 0.0 ? std::numbers::pi - alpha2_star : alpha2_star;
  return {wrap_angle(alpha1 + alpha2), wrap_angle(alpha1 - alpha2)};
}

ArcSet active_arcs(const LinearConstraints& constraints,
                   const Eigen::VectorXd& y_t, const Eigen::VectorXd& nu) {
  std::vector<double> angles;
  for (int i = 0; i < constraints.rows(); ++i) {
    const auto found = constraint_intersections(
        constraints.a_matrix.row(i).transpose(), constraints.c_vector[i], y_t,
        nu);
    angles.insert(angles.end(), found.begin(), found.end());
  }

  ArcSet arcs;
  if (angles.empty()) {
    // Whole ellipse lies in the domain.
    arcs.intervals.emplace_back(0.0, kTwoPi);
    arcs.total_measure = kTwoPi;
    return arcs;
  }

  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return b - a < 1e-12; }),
               angles.end());
  angles.push_back(angles.front() + kTwoPi);

  for (std::size_t q = 0; q + 1 < angles.size(); ++q) {
    const double lo = angles[q];
    const double hi = angles[q + 1];
    const double mid = wrap_angle(0.5 * (lo + hi));
    if (satisfies_all(constraints, ellipse_point(y_t, nu, mid))) {
      arcs.intervals.emplace_back(lo, hi);
      arcs.total_measure += hi - lo;
    }
  }
  if (arcs.intervals.empty()) {
    throw EmptyArcSet("no ellipse arc satisfies the constraints; the "
                      "current state is not strictly inside the domain");
  }
  return arcs;
}

Eigen::VectorXd liness_step(const LinearConstraints& constraints,
                            const CholeskyFactor& factor,
                            const Eigen::VectorXd& y_t, Rng& rng) {
  const Eigen::VectorXd nu =
      sample_mvn_one(factor, Eigen::VectorXd::Zero(y_t.size()), rng);
  const ArcSet arcs = active_arcs(constraints, y_t, nu);

  // Inverse CDF over cumulative arc lengths: uniform across the union.
  double u = rng.uniform() * arcs.total_measure;
  double theta = arcs.intervals.back().second;
  for (const auto& [lo, hi] : arcs.intervals) {
    const double len = hi - lo;
    if (u <= len) {
      theta = lo + u;
      break;
    }
    u -= len;
  }
  return ellipse_point(y_t, nu, wrap_angle(theta));
}

std::vector<Eigen::VectorXd> sample_liness(const LinearConstraints& constraints,
                                           const CholeskyFactor& factor,
                                           const Eigen::VectorXd& y0,
                                           long count, int thin, long burn_in,
                                           Rng& rng) {
  if (count < 1 || thin < 1 || burn_in < 0) {
    throw Error(ErrorKind::validation, "count/thin/burn_in out of range");
  }
  Eigen::VectorXd y = y0;
  for (long i = 0; i < burn_in; ++i) y = liness_step(constraints, factor, y, rng);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    for (int j = 0; j < thin; ++j) y = liness_step(constraints, factor, y, rng);
    out.push_back(y);
  }
  return out;
}

Eigen::VectorXd initial_point(const GaussianParams& params) {
  const int n = params.dim();
  return Eigen::VectorXd::Constant(n, 1.0 / (n + 1.0)) - params.mean;
}

}  // namespace stg
