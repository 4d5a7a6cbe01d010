#pragma once

// Two-class LogitBoost with regression stumps as base learners.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "netcast/learners/model.hpp"

namespace netcast {

struct LogitBoostOptions {
  double prob_clip = 1e-5;
  double response_clip = 4.0;  ///< |working response| bound
  int max_halvings = 30;
};

/// Binomial deviance / 2 of probabilities 1/(1+exp(-2F)).
inline double boost_loss(const Eigen::VectorXd& f, const Eigen::VectorXd& y) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double e = 2.0 * f(i);
    double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    loss += softplus - y(i) * e;
  }
  return loss;
}

namespace detail {

/// Weighted least-squares stump over presorted columns.
inline Stump fit_stump(const Eigen::MatrixXd& z, const std::vector<std::vector<Eigen::Index>>& order,
                       const Eigen::VectorXd& resp, const Eigen::VectorXd& w) {
  const double wsum = w.sum();
  const double ssum = w.dot(resp);
  Stump best;
  best.feature = -1;
  best.left = best.right = wsum > 0 ? ssum / wsum : 0.0;
  double best_gain = wsum > 0 ? ssum * ssum / wsum : 0.0;
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const auto& idx = order[static_cast<std::size_t>(c)];
    double wl = 0.0, sl = 0.0;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      const auto r = idx[k];
      wl += w(r);
      sl += w(r) * resp(r);
      const double here = z(r, c), after = z(idx[k + 1], c);
      if (here == after) continue;
      const double wr = wsum - wl, sr = ssum - sl;
      if (wl <= 0.0 || wr <= 0.0) continue;
      const double gain = sl * sl / wl + sr * sr / wr;
      if (gain > best_gain * (1.0 + 1e-12) + 1e-300) {
        best_gain = gain;
        best.feature = static_cast<int>(c);
        best.threshold = 0.5 * (here + after);
        best.left = sl / wl;
        best.right = sr / wr;
      }
    }
  }
  return best;
}

inline BoostParams logitboost_train(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, int iterations,
                                    const LogitBoostOptions& opt, Convergence& conv) {
  const Eigen::Index n = z.rows();
  BoostParams p;
  const double ybar = std::clamp(y.mean(), opt.prob_clip, 1.0 - opt.prob_clip);
  p.base = 0.5 * std::log(ybar / (1.0 - ybar));
  std::vector<std::vector<Eigen::Index>> order(static_cast<std::size_t>(z.cols()));
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    auto& o = order[static_cast<std::size_t>(c)];
    o.resize(static_cast<std::size_t>(n));
    std::iota(o.begin(), o.end(), Eigen::Index{0});
    std::stable_sort(o.begin(), o.end(), [&z, c](Eigen::Index a, Eigen::Index b) { return z(a, c) < z(b, c); });
  }
  Eigen::VectorXd f = Eigen::VectorXd::Constant(n, p.base);
  double loss = boost_loss(f, y);
  p.loss.push_back(loss);
  conv = {};
  for (int m = 0; m < iterations; ++m) {
    Eigen::VectorXd w(n), resp(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double prob = std::clamp(logistic(2.0 * f(i)), opt.prob_clip, 1.0 - opt.prob_clip);
      w(i) = prob * (1.0 - prob);
      resp(i) = std::clamp((y(i) - prob) / w(i), -opt.response_clip, opt.response_clip);
    }
    if (!(w.sum() > 0.0)) {
      conv.converged = false;
      conv.note = "degenerate weights: stopped early";
      break;
    }
    Stump s = fit_stump(z, order, resp, w);
    Eigen::VectorXd delta(n);
    for (Eigen::Index i = 0; i < n; ++i) delta(i) = 0.5 * s(z.row(i));
    double scale = 1.0;
    double next = boost_loss(f + delta, y);
    int halvings = 0;
    while (next > loss && halvings < opt.max_halvings) {
      scale *= 0.5;
      ++halvings;
      next = boost_loss(f + scale * delta, y);
    }
    if (next > loss) {
      conv.note = "no loss-decreasing stump: stopped early";
      break;
    }
    f += scale * delta;
    loss = next;
    p.stumps.push_back(s);
    p.step_scale.push_back(scale);
    p.loss.push_back(loss);
    conv.iterations = m + 1;
  }
  return p;
}

}  // namespace detail

/// LogitBoost with a fixed number of stumps. Zero stumps predicts the base rate.
inline FittedModel fit_logitboost_fixed(const TrainingSet& train, int iterations, const LogitBoostOptions& opt = {}) {
  require_both_classes(train.y);
  if (iterations < 0) throw ArgumentError("iteration count must be >= 0");
  FittedModel m;
  m.kind = LearnerKind::logitboost;
  m.schema = train.schema;
  m.params = detail::logitboost_train(train.z, train.y, iterations, opt, m.convergence);
  m.tuning["iterations"] = iterations;
  return m;
}

}  // namespace netcast
