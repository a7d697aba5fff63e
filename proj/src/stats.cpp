#include "stg/stats.hpp"

#include <cmath>

namespace stg {

MomentErrors iid_moment_errors(const Eigen::MatrixXd& cov, long m) {
  const int n = static_cast<int>(cov.rows());
  MomentErrors errs;
  errs.se_mean.resize(n);
  errs.se_cov.resize(n, n);
  const double dm = static_cast<double>(m);
  for (int i = 0; i < n; ++i) {
    errs.se_mean[i] = std::sqrt(std::max(cov(i, i), 0.0) / dm);
    for (int j = 0; j < n; ++j) {
      errs.se_cov(i, j) =
          std::sqrt(std::max(cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j),
                             0.0) /
                    dm);
    }
  }
  return errs;
}

MomentErrors batch_moment_errors(const std::vector<Eigen::VectorXd>& samples,
                                 int batches) {
  const long m = static_cast<long>(samples.size());
  const int n = static_cast<int>(samples.front().size());
  if (batches > m / 2) batches = static_cast<int>(m / 2);
  const long len = m / batches;  // trailing remainder is ignored

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (long i = 0; i < batches * len; ++i) mean += samples[i];
  mean /= static_cast<double>(batches * len);

  // Block averages of x and of the centered products (x-mean)(x-mean)^T.
  Eigen::MatrixXd mean_blocks(batches, n);
  std::vector<Eigen::MatrixXd> prod_blocks(
      static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    Eigen::VectorXd bm = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd bp = Eigen::MatrixXd::Zero(n, n);
    for (long i = b * len; i < (b + 1) * len; ++i) {
      bm += samples[i];
      const Eigen::VectorXd d = samples[i] - mean;
      bp += d * d.transpose();
    }
    mean_blocks.row(b) = (bm / static_cast<double>(len)).transpose();
    prod_blocks[b] = bp / static_cast<double>(len);
  }

  MomentErrors errs;
  errs.se_mean.resize(n);
  errs.se_cov.resize(n, n);
  const double db = static_cast<double>(batches);
  for (int i = 0; i < n; ++i) {
    const double mu = mean_blocks.col(i).mean();
    double v = (mean_blocks.col(i).array() - mu).square().sum() / (db - 1.0);
    errs.se_mean[i] = std::sqrt(v / db);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double mu = 0.0;
      for (int b = 0; b < batches; ++b) mu += prod_blocks[b](i, j);
      mu /= db;
      double v = 0.0;
      for (int b = 0; b < batches; ++b) {
        const double d = prod_blocks[b](i, j) - mu;
        v += d * d;
      }
      v /= (db - 1.0);
      errs.se_cov(i, j) = std::sqrt(v / db);
    }
  }
  return errs;
}

}  // namespace stg
