#pragma once

// Elastic-net penalized logistic regression with the ridge weight fixed at
// twice the lasso weight:
//   minimize  -loglik + lambda * |b|_1 + (2 lambda / 2) * |b|_2^2
// over non-intercept coefficients, by cyclic coordinate descent on the
// quadratic approximation of the likelihood.

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "netcast/learners/logit.hpp"
#include "netcast/learners/model.hpp"

namespace netcast {

struct ElasticNetOptions {
  int max_outer = 100;
  int max_sweeps = 1000;
  double tolerance = 1e-9;
  double coefficient_cap = 30.0;
};

inline double elastic_net_objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const LinearParams& p, double lambda) {
  return -log_likelihood(z, y, p.intercept, p.coef) + lambda * p.coef.lpNorm<1>() + lambda * p.coef.squaredNorm();
}

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

namespace detail {

/// Fixed-lambda solve on standardized columns. `start` provides a warm start.
inline LinearParams elastic_net_solve(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double lambda,
                                      const ElasticNetOptions& opt, Convergence& conv, const LinearParams* start = nullptr) {
  const Eigen::Index n = z.rows(), p = z.cols();
  LinearParams cur;
  if (start && start->coef.size() == p) {
    cur = *start;
  } else {
    const double ybar = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
    cur.intercept = std::log(ybar / (1.0 - ybar));
    cur.coef = Eigen::VectorXd::Zero(p);
  }
  double objective = elastic_net_objective(z, y, cur, lambda);
  conv = {};
  conv.converged = false;

  for (int outer = 0; outer < opt.max_outer; ++outer) {
    conv.iterations = outer + 1;
    Eigen::VectorXd eta = (z * cur.coef).array() + cur.intercept;
    Eigen::VectorXd prob = eta.unaryExpr([](double e) { return logistic(e); });
    Eigen::VectorXd w = (prob.array() * (1.0 - prob.array())).max(1e-5);
    Eigen::VectorXd work = eta.array() + (y - prob).array() / w.array();

    // Weighted penalized least squares by coordinate descent.
    LinearParams next = cur;
    Eigen::VectorXd resid = work - (z * next.coef).array().matrix() - Eigen::VectorXd::Constant(n, next.intercept);
    Eigen::VectorXd col_weight(p);
    for (Eigen::Index j = 0; j < p; ++j) col_weight(j) = (w.array() * z.col(j).array().square()).sum();
    const double wsum = w.sum();
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
      double max_change = 0.0;
      double b0 = next.intercept + (w.array() * resid.array()).sum() / wsum;
      resid.array() -= b0 - next.intercept;
      max_change = std::max(max_change, std::abs(b0 - next.intercept));
      next.intercept = b0;
      for (Eigen::Index j = 0; j < p; ++j) {
        const double old = next.coef(j);
        const double rho = (w.array() * z.col(j).array() * resid.array()).sum() + col_weight(j) * old;
        double nb = soft_threshold(rho, lambda) / (col_weight(j) + 2.0 * lambda);
        nb = std::clamp(nb, -opt.coefficient_cap, opt.coefficient_cap);
        if (nb != old) {
          resid -= (nb - old) * z.col(j);
          max_change = std::max(max_change, std::abs(nb - old));
          next.coef(j) = nb;
        }
      }
      if (max_change < opt.tolerance * 0.1) break;
    }

    // Step halving toward the previous iterate if the quadratic step overshoots.
    double next_obj = elastic_net_objective(z, y, next, lambda);
    for (int h = 0; h < 40 && next_obj > objective + 1e-12 * std::abs(objective); ++h) {
      next.intercept = 0.5 * (next.intercept + cur.intercept);
      next.coef = 0.5 * (next.coef + cur.coef);
      next_obj = elastic_net_objective(z, y, next, lambda);
    }
    double change = std::abs(next.intercept - cur.intercept);
    if (p > 0) change = std::max(change, (next.coef - cur.coef).cwiseAbs().maxCoeff());
    cur = next;
    objective = next_obj;
    if (change < opt.tolerance) {
      conv.converged = true;
      break;
    }
  }
  for (Eigen::Index j = 0; j < p; ++j)
    if (std::abs(cur.coef(j)) >= opt.coefficient_cap) conv.separation = true;
  if (!conv.converged) conv.note = "coordinate descent did not converge";
  else if (conv.separation) conv.note = "quasi-separation: coefficient cap reached";
  return cur;
}

}  // namespace detail

/// Elastic net at a fixed lambda (no tuning).
inline FittedModel fit_elastic_net_fixed(const TrainingSet& train, double lambda, const ElasticNetOptions& opt = {}) {
  require_both_classes(train.y);
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be non-negative");
  FittedModel m;
  m.kind = LearnerKind::elastic_net;
  m.schema = train.schema;
  m.params = detail::elastic_net_solve(train.z, train.y, lambda, opt, m.convergence);
  m.tuning["lambda"] = lambda;
  return m;
}

}  // namespace netcast
