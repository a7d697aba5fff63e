#pragma once

#include <Eigen/Dense>
#include <vector>

namespace stg {

/// Streaming mean/covariance accumulator (Welford), so the rejection
/// sampler never has to hold its accepted draws in memory.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(int dim)
      : count_(0),
        mean_(Eigen::VectorXd::Zero(dim)),
        m2_(Eigen::MatrixXd::Zero(dim, dim)) {}

  void add(const Eigen::VectorXd& x) {
    ++count_;
    const Eigen::VectorXd delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_).transpose();
  }

  long count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }

  /// Sample covariance with the m-1 denominator, symmetrized.
  Eigen::MatrixXd covariance() const {
    Eigen::MatrixXd c = m2_ / static_cast<double>(count_ - 1);
    return 0.5 * (c + c.transpose());
  }

 private:
  long count_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd m2_;
};

/// Standard errors of the sample mean and covariance entries for
/// independent draws (normal-theory asymptotics).
struct MomentErrors {
  Eigen::VectorXd se_mean;
  Eigen::MatrixXd se_cov;
};

MomentErrors iid_moment_errors(const Eigen::MatrixXd& cov, long m);

/// Batch-means standard errors for correlated (MCMC) draws: the chain is
/// cut into `batches` contiguous blocks and the spread of block averages
/// estimates the error of the overall average. Covariance-entry errors
/// use centered products around the full-chain mean.
MomentErrors batch_moment_errors(const std::vector<Eigen::VectorXd>& samples,
                                 int batches = 50);

}  // namespace stg
