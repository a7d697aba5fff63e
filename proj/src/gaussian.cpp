#include "stg/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "stg/errors.hpp"

namespace stg {

GaussianParams validate_params(const Eigen::VectorXd& mean,
                               const Eigen::MatrixXd& cov) {
  const auto n = mean.size();
  if (n < 2) {
    throw DimensionMismatch("mean must have length >= 2, got " +
                            std::to_string(n));
  }
  if (cov.rows() != n || cov.cols() != n) {
    throw DimensionMismatch("covariance must be " + std::to_string(n) + "x" +
                            std::to_string(n));
  }
  const double scale = cov.cwiseAbs().maxCoeff();
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw NotSymmetric("covariance asymmetry " + std::to_string(asym) +
                       " exceeds tolerance");
  }
  GaussianParams params;
  params.mean = mean;
  params.cov = 0.5 * (cov + cov.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(params.cov,
                                                     Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (hi <= 0.0 || lo <= kEpsPositiveDefinite * hi) {
    throw NotPositiveDefinite("covariance is not positive definite (min/max "
                              "eigenvalues " +
                              std::to_string(lo) + ", " + std::to_string(hi) +
                              ")");
  }
  return params;
}

CholeskyFactor cholesky(const GaussianParams& params) {
  Eigen::LLT<Eigen::MatrixXd> llt(params.cov);
  if (llt.info() != Eigen::Success) {
    throw FactorizationFailed("Cholesky factorization failed");
  }
  CholeskyFactor factor;
  factor.lower = llt.matrixL();
  factor.log_det = 2.0 * factor.lower.diagonal().array().log().sum();
  return factor;
}

double log_density(const GaussianParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.mean.size()) {
    throw DimensionMismatch("point has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(params.mean.size()));
  }
  const CholeskyFactor factor = cholesky(params);
  const Eigen::VectorXd u =
      factor.lower.triangularView<Eigen::Lower>().solve(x - params.mean);
  const double n = static_cast<double>(params.dim());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + factor.log_det +
                 u.squaredNorm());
}

Eigen::VectorXd sample_mvn_one(const CholeskyFactor& factor,
                               const Eigen::VectorXd& mean, Rng& rng) {
  const auto n = mean.size();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  return mean + factor.lower.triangularView<Eigen::Lower>() * z;
}

std::vector<Eigen::VectorXd> sample_mvn(const CholeskyFactor& factor,
                                        const Eigen::VectorXd& mean, Rng& rng,
                                        long count) {
  if (factor.dim() != mean.size()) {
    throw DimensionMismatch("factor and mean dimensions differ");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(sample_mvn_one(factor, mean, rng));
  return out;
}

}  // namespace stg
