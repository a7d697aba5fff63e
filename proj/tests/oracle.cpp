#include "oracle.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace oracle {

namespace {

double legendre_value(int n, double x, double& derivative) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  derivative = n * (x * p1 - p0) / (x * x - 1.0);
  return p1;
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double p = legendre_value(order, x, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    legendre_value(order, x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[order - 1 - i] = x;
    rule.weights[order - 1 - i] = w;
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    int order) {
  const GaussRule& rule = gauss_rule(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

double density_explicit(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                        const Eigen::VectorXd& x) {
  const Eigen::MatrixXd inv = cov.inverse();
  const double det = cov.determinant();
  const Eigen::VectorXd d = x - mean;
  const double quad = d.dot(inv * d);
  const double n = static_cast<double>(mean.size());
  return std::exp(-0.5 * quad) /
         (std::pow(2.0 * std::numbers::pi, 0.5 * n) * std::sqrt(det));
}

TriangleMoments triangle_moments(const Eigen::VectorXd& mean,
                                 const Eigen::MatrixXd& cov, int nodes) {
  const Eigen::MatrixXd inv = cov.inverse();
  const double det = cov.determinant();
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  const GaussRule& rule = gauss_rule(nodes);

  double z = 0.0;
  Eigen::Vector2d m = Eigen::Vector2d::Zero();
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  // x2 in [0,1], x1 = (1-x2)*u with u in [0,1]; Jacobian (1-x2).
  for (int i = 0; i < nodes; ++i) {
    const double x2 = 0.5 * (1.0 + rule.nodes[i]);
    const double w2 = 0.5 * rule.weights[i];
    const double span = 1.0 - x2;
    for (int j = 0; j < nodes; ++j) {
      const double u = 0.5 * (1.0 + rule.nodes[j]);
      const double wu = 0.5 * rule.weights[j];
      const double x1 = span * u;
      const double d1 = x1 - mean[0];
      const double d2 = x2 - mean[1];
      const double quad = inv(0, 0) * d1 * d1 + 2.0 * inv(0, 1) * d1 * d2 +
                          inv(1, 1) * d2 * d2;
      const double f = norm * std::exp(-0.5 * quad) * span * w2 * wu;
      z += f;
      m[0] += f * x1;
      m[1] += f * x2;
      s(0, 0) += f * x1 * x1;
      s(0, 1) += f * x1 * x2;
      s(1, 1) += f * x2 * x2;
    }
  }
  s(1, 0) = s(0, 1);

  TriangleMoments out;
  out.z = z;
  out.mean = m / z;
  out.second = s / z;
  out.cov = out.second - out.mean * out.mean.transpose();
  return out;
}

double box_prob_2d(const Eigen::MatrixXd& cov, const Eigen::Vector2d& a,
                   const Eigen::Vector2d& b, int nodes) {
  const Eigen::MatrixXd inv = cov.inverse();
  const double det = cov.determinant();
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  const GaussRule& rule = gauss_rule(nodes);
  double z = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double x1 = 0.5 * (a[0] + b[0]) + 0.5 * (b[0] - a[0]) * rule.nodes[i];
    const double w1 = 0.5 * (b[0] - a[0]) * rule.weights[i];
    for (int j = 0; j < nodes; ++j) {
      const double x2 =
          0.5 * (a[1] + b[1]) + 0.5 * (b[1] - a[1]) * rule.nodes[j];
      const double w2 = 0.5 * (b[1] - a[1]) * rule.weights[j];
      const double quad = inv(0, 0) * x1 * x1 + 2.0 * inv(0, 1) * x1 * x2 +
                          inv(1, 1) * x2 * x2;
      z += norm * std::exp(-0.5 * quad) * w1 * w2;
    }
  }
  return z;
}

Univariate truncated_univariate(double sigma, double a, double b) {
  const auto cdf = [](double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
  };
  const double alpha = a / sigma;
  const double beta = b / sigma;
  const double zmass = cdf(beta) - cdf(alpha);
  const double pa = std_normal_pdf(alpha);
  const double pb = std_normal_pdf(beta);
  Univariate out;
  out.mean = sigma * (pa - pb) / zmass;
  const double m2 = 1.0 + (alpha * pa - beta * pb) / zmass;
  out.variance = sigma * sigma * m2 - out.mean * out.mean;
  return out;
}

double normal_cdf_quadrature(double x) {
  return 0.5 + integrate_1d(std_normal_pdf, 0.0, x, 200);
}

}  // namespace oracle
