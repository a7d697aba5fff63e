#pragma once

#include <Eigen/Dense>

namespace stg {

/// Standard normal CDF, accurate to ~1e-16 absolute; exact 0/1 at -+inf.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Univariate normal density with mean zero and variance var.
double normal_pdf_var(double w, double var);

/// Inverse of normal_cdf on (0, 1) (Wichura's AS 241, double precision).
double inverse_normal_cdf(double p);

/// Bivariate normal density at w with mean zero and 2x2 covariance eps.
double binormal_pdf(double w1, double w2, const Eigen::Matrix2d& eps);

}  // namespace stg
