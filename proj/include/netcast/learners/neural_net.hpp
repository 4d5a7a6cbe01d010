#pragma once

// Single-hidden-layer feed-forward network with logistic units, trained on
// cross-entropy + decay * (sum of squared weights) by full-batch gradient
// descent with an adaptive step. Biases are not decayed.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "netcast/learners/model.hpp"

namespace netcast {

struct NeuralNetOptions {
  int max_iterations = 1000;
  double gradient_tolerance = 1e-5;
  double initial_step = 0.01;
  double init_range = 0.5;
  int restarts = 3;
};

/// Flat parameter layout: w1 (hidden x inputs, row-major), b1, w2, b2.
struct NetLayout {
  Eigen::Index inputs = 0;
  Eigen::Index hidden = 0;
  Eigen::Index size() const { return hidden * inputs + 2 * hidden + 1; }

  NetParams unpack(const Eigen::VectorXd& theta) const {
    NetParams p;
    p.w1.resize(hidden, inputs);
    Eigen::Index k = 0;
    for (Eigen::Index h = 0; h < hidden; ++h)
      for (Eigen::Index i = 0; i < inputs; ++i) p.w1(h, i) = theta(k++);
    p.b1 = theta.segment(k, hidden);
    k += hidden;
    p.w2 = theta.segment(k, hidden);
    k += hidden;
    p.b2 = theta(k);
    return p;
  }

  Eigen::VectorXd pack(const NetParams& p) const {
    Eigen::VectorXd theta(size());
    Eigen::Index k = 0;
    for (Eigen::Index h = 0; h < hidden; ++h)
      for (Eigen::Index i = 0; i < inputs; ++i) theta(k++) = p.w1(h, i);
    theta.segment(k, hidden) = p.b1;
    k += hidden;
    theta.segment(k, hidden) = p.w2;
    k += hidden;
    theta(k) = p.b2;
    return theta;
  }
};

/// Penalized cross-entropy at `theta`; writes the analytic gradient when asked.
inline double neural_net_objective(const NetLayout& layout, const Eigen::VectorXd& theta, const Eigen::MatrixXd& z,
                                   const Eigen::VectorXd& y, double decay, Eigen::VectorXd* grad = nullptr) {
  const NetParams p = layout.unpack(theta);
  const Eigen::MatrixXd pre = (z * p.w1.transpose()).rowwise() + p.b1.transpose();
  const Eigen::MatrixXd h = pre.unaryExpr([](double a) { return logistic(a); });
  const Eigen::VectorXd out = (h * p.w2).array() + p.b2;
  double loss = 0.0;
  Eigen::VectorXd delta(out.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double a = out(i);
    const double softplus = a > 0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
    loss += softplus - y(i) * a;
    delta(i) = logistic(a) - y(i);
  }
  loss += decay * (p.w1.squaredNorm() + p.w2.squaredNorm());
  if (grad) {
    NetParams g;
    g.w2 = h.transpose() * delta + 2.0 * decay * p.w2;
    g.b2 = delta.sum();
    const Eigen::MatrixXd dh = (delta * p.w2.transpose()).array() * h.array() * (1.0 - h.array());
    g.w1 = dh.transpose() * z + 2.0 * decay * p.w1;
    g.b1 = dh.colwise().sum().transpose();
    *grad = layout.pack(g);
  }
  return loss;
}

namespace detail {

struct NetTrainResult {
  NetParams params;
  double objective = std::numeric_limits<double>::infinity();
  Convergence convergence;
};

inline NetTrainResult neural_net_train(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, int hidden, double decay,
                                       std::uint64_t seed, const NeuralNetOptions& opt) {
  const NetLayout layout{z.cols(), hidden};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-opt.init_range, opt.init_range);
  NetTrainResult best;
  best.convergence.converged = false;
  int failures = 0;
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    Eigen::VectorXd theta(layout.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = init(rng);
    const double ybar = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
    theta(theta.size() - 1) = std::log(ybar / (1.0 - ybar));

    double step = opt.initial_step;
    Eigen::VectorXd grad;
    double value = neural_net_objective(layout, theta, z, y, decay, &grad);
    for (int attempt = 0; !std::isfinite(value) && attempt < 5; ++attempt) {
      theta *= 0.1;
      step *= 0.1;
      value = neural_net_objective(layout, theta, z, y, decay, &grad);
    }
    if (!std::isfinite(value)) {
      ++failures;
      continue;
    }
    Convergence conv;
    conv.converged = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
      if (grad.norm() < opt.gradient_tolerance) {
        conv.converged = true;
        break;
      }
      bool accepted = false;
      while (step > 1e-14) {
        Eigen::VectorXd candidate = theta - step * grad;
        Eigen::VectorXd cgrad;
        double cv = neural_net_objective(layout, candidate, z, y, decay, &cgrad);
        if (std::isfinite(cv) && cv <= value) {
          theta = std::move(candidate);
          grad = std::move(cgrad);
          value = cv;
          step *= 1.2;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        conv.converged = true;
        break;
      }
    }
    conv.iterations = it;
    if (value < best.objective) {
      best.objective = value;
      best.params = layout.unpack(theta);
      best.convergence = conv;
    }
  }
  if (!std::isfinite(best.objective)) throw FitError("neural network loss non-finite on every restart");
  if (failures > 0) best.convergence.note = std::to_string(failures) + " restart(s) abandoned: non-finite loss";
  return best;
}

}  // namespace detail

/// Network with fixed hidden size and decay; the restart with the lowest
/// penalized training objective is kept.
inline FittedModel fit_neural_net_fixed(const TrainingSet& train, int hidden, double decay, std::uint64_t seed,
                                        const NeuralNetOptions& opt = {}) {
  require_both_classes(train.y);
  if (hidden < 1) throw ArgumentError("hidden layer needs at least one unit");
  if (!(decay >= 0.0)) throw ArgumentError("decay must be non-negative");
  auto r = detail::neural_net_train(train.z, train.y, hidden, decay, seed, opt);
  FittedModel m;
  m.kind = LearnerKind::neural_net;
  m.schema = train.schema;
  m.params = std::move(r.params);
  m.convergence = r.convergence;
  m.seed = seed;
  m.tuning["hidden"] = hidden;
  m.tuning["decay"] = decay;
  return m;
}

}  // namespace netcast
