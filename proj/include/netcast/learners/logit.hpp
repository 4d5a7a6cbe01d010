#pragma once

// Maximum-likelihood logistic regression by iteratively reweighted least squares.

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "netcast/learners/model.hpp"

namespace netcast {

struct LogitOptions {
  int max_iterations = 100;
  double score_tolerance = 1e-8;
  double coefficient_cap = 30.0;  ///< on the standardized scale
};

/// Log-likelihood of y under logistic(intercept + z b), computed stably.
inline double log_likelihood(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double intercept, const Eigen::VectorXd& b) {
  Eigen::VectorXd eta = (z * b).array() + intercept;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double e = eta(i);
    double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += y(i) * e - softplus;
  }
  return ll;
}

namespace detail {

inline LinearParams irls(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const LogitOptions& opt, Convergence& conv) {
  const Eigen::Index n = z.rows(), p = z.cols();
  Eigen::MatrixXd x(n, p + 1);
  x.col(0).setOnes();
  x.rightCols(p) = z;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  const double ybar = y.mean();
  beta(0) = std::log(ybar / (1.0 - ybar));

  auto ll = [&](const Eigen::VectorXd& b) { return log_likelihood(z, y, b(0), b.tail(p)); };
  double current = ll(beta);
  conv = {};
  conv.converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    conv.iterations = it + 1;
    Eigen::VectorXd prob = (x * beta).unaryExpr([](double e) { return logistic(e); });
    Eigen::VectorXd score = x.transpose() * (y - prob);
    if (score.cwiseAbs().maxCoeff() < opt.score_tolerance) {
      conv.converged = true;
      break;
    }
    Eigen::VectorXd w = (prob.array() * (1.0 - prob.array())).max(1e-12);
    Eigen::MatrixXd info = x.transpose() * w.asDiagonal() * x;
    info.diagonal().array() += 1e-12;
    Eigen::VectorXd step = info.ldlt().solve(score);
    // Step halving keeps the likelihood non-decreasing.
    Eigen::VectorXd next = beta;
    double value = current;
    double scale = 1.0;
    bool moved = false;
    for (int h = 0; h < 40; ++h, scale *= 0.5) {
      next = beta + scale * step;
      bool capped = false;
      for (Eigen::Index k = 0; k < next.size(); ++k)
        if (std::abs(next(k)) > opt.coefficient_cap) {
          next(k) = std::copysign(opt.coefficient_cap, next(k));
          capped = true;
        }
      value = ll(next);
      if (value >= current - 1e-12 * std::abs(current)) {
        moved = true;
        if (capped) conv.separation = true;
        break;
      }
    }
    if (!moved) break;
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    current = value;
    if (change < 1e-12) {
      // Pinned at the cap or numerically stationary.
      conv.converged = !conv.separation;
      break;
    }
  }
  if (conv.separation) conv.note = "quasi-separation: coefficient cap reached";
  return {beta(0), beta.tail(p)};
}

}  // namespace detail

inline FittedModel fit_logit(const TrainingSet& train, const LogitOptions& opt = {}) {
  require_both_classes(train.y);
  FittedModel m;
  m.kind = LearnerKind::logit;
  m.schema = train.schema;
  m.params = detail::irls(train.z, train.y, opt, m.convergence);
  return m;
}

}  // namespace netcast
