#pragma once

// Two-dimensional latent space model: P(i -> j) = logistic(alpha - |z_i - z_j|),
// fit by penalized maximum likelihood (MAP) with monotone gradient ascent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "netcast/errors.hpp"
#include "netcast/panel.hpp"

namespace netcast {

struct LatentSpaceConfig {
  int starts = 4;
  int max_iterations = 3000;
  double gradient_tolerance = 1e-6;
  double position_variance = 10.0;   ///< Gaussian prior variance per coordinate
  double intercept_variance = 100.0;
  double initial_step = 0.05;
};

struct LatentSpaceFit {
  std::vector<int> nodes;           ///< panel node indices, ascending
  Eigen::MatrixXd positions;        ///< nodes x 2
  double intercept = 0.0;
  double objective = 0.0;
  double initial_objective = 0.0;   ///< objective of the kept start at its initialization
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;          ///< no edges or complete graph; positions at the prior mode
  int start = 0;

  std::optional<std::size_t> local(int node) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
    if (it == nodes.end() || *it != node) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  }
};

namespace detail {

class LatentSpaceObjective {
 public:
  LatentSpaceObjective(const Eigen::MatrixXd& y, const LatentSpaceConfig& cfg) : y_(y), cfg_(cfg) {}

  /// Penalized log-likelihood; fills gradients when requested.
  double operator()(const Eigen::MatrixXd& z, double alpha, Eigen::MatrixXd* gz = nullptr,
                    double* galpha = nullptr) const {
    const Eigen::Index n = z.rows();
    double total = 0.0;
    if (gz) gz->setZero(n, 2);
    if (galpha) *galpha = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        Eigen::RowVector2d diff = z.row(i) - z.row(j);
        double d = diff.norm();
        double eta = alpha - d;
        // log-likelihood y*eta - log(1+e^eta), computed stably
        double softplus = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
        total += y_(i, j) * eta - softplus;
        if (gz || galpha) {
          double p = 1.0 / (1.0 + std::exp(-eta));
          double resid = y_(i, j) - p;
          if (galpha) *galpha += resid;
          if (gz && d > 1e-12) {
            Eigen::RowVector2d g = -resid * diff / d;
            gz->row(i) += g;
            gz->row(j) -= g;
          }
        }
      }
    total -= z.squaredNorm() / (2.0 * cfg_.position_variance);
    total -= alpha * alpha / (2.0 * cfg_.intercept_variance);
    if (gz) *gz -= z / cfg_.position_variance;
    if (galpha) *galpha -= alpha / cfg_.intercept_variance;
    return total;
  }

 private:
  const Eigen::MatrixXd& y_;
  LatentSpaceConfig cfg_;
};

/// Classical multidimensional scaling of shortest-path distances on the
/// symmetrized graph; unreachable pairs get (max finite distance + 1).
inline Eigen::MatrixXd mds_start(const Eigen::MatrixXd& y) {
  const Eigen::Index n = y.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(n, n, -1.0);
  double max_finite = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    std::queue<Eigen::Index> frontier;
    dist(s, s) = 0.0;
    frontier.push(s);
    while (!frontier.empty()) {
      auto v = frontier.front();
      frontier.pop();
      for (Eigen::Index w = 0; w < n; ++w)
        if ((y(v, w) > 0.5 || y(w, v) > 0.5) && dist(s, w) < 0) {
          dist(s, w) = dist(s, v) + 1.0;
          max_finite = std::max(max_finite, dist(s, w));
          frontier.push(w);
        }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (dist(i, j) < 0) dist(i, j) = max_finite + 1.0;
  Eigen::MatrixXd sq = dist.array().square();
  Eigen::MatrixXd center = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd b = -0.5 * center * sq * center;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, 2);
  for (int c = 0; c < 2 && c < n; ++c) {
    Eigen::Index k = n - 1 - c;  // eigenvalues ascending
    double lambda = std::max(0.0, eig.eigenvalues()(k));
    Eigen::VectorXd v = eig.eigenvectors().col(k);
    // Fix the eigenvector sign so the start is reproducible.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    z.col(c) = v * std::sqrt(lambda);
  }
  return z;
}

}  // namespace detail

/// MAP fit from several starts (MDS start, then seeded perturbations of it);
/// the start with the highest objective is kept.
inline LatentSpaceFit fit_latent_space(const LaggedNetwork& net, std::uint64_t seed,
                                       const LatentSpaceConfig& cfg = {}) {
  if (net.nodes.empty()) throw ArgumentError("latent space fit on an empty node set");
  const auto n = static_cast<Eigen::Index>(net.nodes.size());
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
  auto local = [&net](int v) {
    return static_cast<Eigen::Index>(std::lower_bound(net.nodes.begin(), net.nodes.end(), v) - net.nodes.begin());
  };
  double ties = 0.0;
  for (const auto& e : net.edges)
    if (net.contains(e.sender) && net.contains(e.receiver)) {
      y(local(e.sender), local(e.receiver)) = 1.0;
      ties += 1.0;
    }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);

  LatentSpaceFit fit;
  fit.nodes = net.nodes;
  detail::LatentSpaceObjective objective(y, cfg);
  if (ties == 0.0 || ties == pairs) {
    fit.degenerate = true;
    fit.positions = Eigen::MatrixXd::Zero(n, 2);
    fit.intercept = std::log((ties + 0.5) / (pairs - ties + 0.5));
    fit.objective = fit.initial_objective = objective(fit.positions, fit.intercept);
    fit.converged = true;
    return fit;
  }

  const Eigen::MatrixXd base = detail::mds_start(y);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, cfg.starts); ++s) {
    Eigen::MatrixXd z = base;
    if (s > 0)
      for (Eigen::Index i = 0; i < n; ++i)
        for (int c = 0; c < 2; ++c) z(i, c) += noise(rng);
    // Intercept starts where the mean tie probability matches the density.
    double mean_dist = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) mean_dist += (z.row(i) - z.row(j)).norm();
    mean_dist /= pairs;
    double alpha = std::log(ties / (pairs - ties)) + mean_dist;

    Eigen::MatrixXd gz;
    double ga = 0.0;
    double value = objective(z, alpha, &gz, &ga);
    const double initial = value;
    double step = cfg.initial_step;
    int it = 0;
    bool converged = false;
    for (; it < cfg.max_iterations; ++it) {
      double gnorm = std::sqrt(gz.squaredNorm() + ga * ga);
      if (gnorm < cfg.gradient_tolerance) {
        converged = true;
        break;
      }
      bool accepted = false;
      while (step > 1e-14) {
        Eigen::MatrixXd z_new = z + step * gz;
        double a_new = alpha + step * ga;
        double v_new = objective(z_new, a_new);
        if (v_new >= value) {
          z = std::move(z_new);
          alpha = a_new;
          value = objective(z, alpha, &gz, &ga);
          step *= 1.2;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        converged = true;  // no ascent direction left at machine precision
        break;
      }
    }
    if (value > best) {
      best = value;
      fit.positions = z;
      fit.intercept = alpha;
      fit.objective = value;
      fit.initial_objective = initial;
      fit.iterations = it;
      fit.converged = converged;
      fit.start = s;
    }
  }
  return fit;
}

inline double latent_distance(const LatentSpaceFit& fit, int i, int j) {
  auto a = fit.local(i);
  auto b = fit.local(j);
  if (!a || !b) throw ArgumentError("node not in latent space fit");
  return (fit.positions.row(static_cast<Eigen::Index>(*a)) - fit.positions.row(static_cast<Eigen::Index>(*b))).norm();
}

/// Fitted tie probability logistic(alpha - distance).
inline double latent_tie_probability(const LatentSpaceFit& fit, int i, int j) {
  return 1.0 / (1.0 + std::exp(-(fit.intercept - latent_distance(fit, i, j))));
}

}  // namespace netcast
