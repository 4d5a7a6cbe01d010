#pragma once

// Mixed-membership stochastic blockmodel fit by variational EM on the
// directed binary adjacency of a lagged network.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>

#include "netcast/errors.hpp"
#include "netcast/panel.hpp"

namespace netcast {

struct MmsbmConfig {
  int blocks = 4;
  int restarts = 5;
  int max_iterations = 200;
  double tolerance = 1e-6;     ///< relative ELBO change for convergence
  double dirichlet = 0.1;      ///< symmetric membership prior
  double block_pseudocount = 1e-8;  ///< Beta(1+c, 1+c) prior keeps B strictly inside (0,1)
};

struct MmsbmFit {
  std::vector<int> nodes;        ///< panel node indices, ascending
  int blocks = 0;
  Eigen::MatrixXd membership;    ///< nodes x blocks, rows on the simplex
  Eigen::MatrixXd block_matrix;  ///< blocks x blocks tie probabilities
  std::vector<double> objective; ///< ELBO trace of the kept restart
  bool converged = false;
  int iterations = 0;
  int restart = 0;

  std::optional<std::size_t> local(int node) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
    if (it == nodes.end() || *it != node) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  }
};

namespace detail {

class MmsbmState {
 public:
  MmsbmState(const Eigen::MatrixXd& y, const MmsbmConfig& cfg, std::mt19937_64& rng)
      : y_(y), n_(static_cast<int>(y.rows())), k_(cfg.blocks), cfg_(cfg) {
    gamma_.resize(n_, k_);
    std::gamma_distribution<double> g(1.0, 1.0);
    for (int p = 0; p < n_; ++p)
      for (int a = 0; a < k_; ++a) gamma_(p, a) = cfg_.dirichlet + static_cast<double>(n_) * g(rng) / k_;
    send_.assign(static_cast<std::size_t>(n_ * n_), Eigen::VectorXd::Constant(k_, 1.0 / k_));
    recv_ = send_;
    for (auto* table : {&send_, &recv_})
      for (auto& v : *table) {
        for (int a = 0; a < k_; ++a) v(a) = g(rng);
        v /= v.sum();
      }
    update_blocks();
  }

  /// One sweep: per-dyad indicator updates, membership update, block update.
  void sweep() {
    refresh_elog();
    Eigen::MatrixXd lb = log_b_.array(), lnb = log_nb_.array();
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q) {
        if (p == q) continue;
        const Eigen::MatrixXd& lik = y_(p, q) > 0.5 ? lb : lnb;
        auto& s = send_[at(p, q)];
        auto& r = recv_[at(p, q)];
        s = normalize_log(elog_.row(p).transpose() + lik * r);
        r = normalize_log(elog_.row(q).transpose() + lik.transpose() * s);
      }
    gamma_.setConstant(cfg_.dirichlet);
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q) {
        if (p == q) continue;
        gamma_.row(p) += send_[at(p, q)].transpose();
        gamma_.row(q) += recv_[at(p, q)].transpose();
      }
    update_blocks();
  }

  double elbo() {
    refresh_elog();
    const double a = cfg_.dirichlet;
    double total = 0.0;
    for (int p = 0; p < n_; ++p) {
      double gsum = gamma_.row(p).sum();
      total += std::lgamma(k_ * a) - k_ * std::lgamma(a);
      total -= std::lgamma(gsum);
      for (int g = 0; g < k_; ++g) {
        total += (a - 1.0) * elog_(p, g);
        total += std::lgamma(gamma_(p, g)) - (gamma_(p, g) - 1.0) * elog_(p, g);
      }
    }
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q) {
        if (p == q) continue;
        const auto& s = send_[at(p, q)];
        const auto& r = recv_[at(p, q)];
        total += s.dot(elog_.row(p).transpose()) + r.dot(elog_.row(q).transpose());
        const Eigen::MatrixXd& lik = y_(p, q) > 0.5 ? log_b_ : log_nb_;
        total += s.dot(lik * r);
        for (int g = 0; g < k_; ++g) {
          if (s(g) > 0) total -= s(g) * std::log(s(g));
          if (r(g) > 0) total -= r(g) * std::log(r(g));
        }
      }
    const double c = cfg_.block_pseudocount;
    total += c * (log_b_.sum() + log_nb_.sum());
    return total;
  }

  Eigen::MatrixXd membership() const {
    Eigen::MatrixXd m = gamma_;
    for (int p = 0; p < n_; ++p) m.row(p) /= m.row(p).sum();
    return m;
  }
  const Eigen::MatrixXd& blocks() const { return b_; }

 private:
  std::size_t at(int p, int q) const { return static_cast<std::size_t>(p * n_ + q); }

  static Eigen::VectorXd normalize_log(const Eigen::VectorXd& v) {
    Eigen::VectorXd out = (v.array() - v.maxCoeff()).exp();
    return out / out.sum();
  }

  void refresh_elog() {
    elog_.resize(n_, k_);
    for (int p = 0; p < n_; ++p) {
      double d = boost::math::digamma(gamma_.row(p).sum());
      for (int g = 0; g < k_; ++g) elog_(p, g) = boost::math::digamma(gamma_(p, g)) - d;
    }
  }

  void update_blocks() {
    Eigen::MatrixXd hits = Eigen::MatrixXd::Zero(k_, k_), mass = Eigen::MatrixXd::Zero(k_, k_);
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q) {
        if (p == q) continue;
        Eigen::MatrixXd w = send_[at(p, q)] * recv_[at(p, q)].transpose();
        mass += w;
        if (y_(p, q) > 0.5) hits += w;
      }
    const double c = cfg_.block_pseudocount;
    b_ = ((hits.array() + c) / (mass.array() + 2.0 * c)).matrix();
    log_b_ = b_.array().log();
    log_nb_ = (1.0 - b_.array()).log();
  }

  const Eigen::MatrixXd& y_;
  int n_, k_;
  MmsbmConfig cfg_;
  Eigen::MatrixXd gamma_, elog_, b_, log_b_, log_nb_;
  std::vector<Eigen::VectorXd> send_, recv_;
};

}  // namespace detail

/// Fits the model with `cfg.restarts` seeded restarts and keeps the restart
/// with the highest final ELBO. Non-convergence is reported through
/// `converged`, never thrown.
inline MmsbmFit fit_mmsbm(const LaggedNetwork& net, const MmsbmConfig& cfg, std::uint64_t seed) {
  if (cfg.blocks < 1) throw ArgumentError("MMSBM needs at least one block");
  if (net.nodes.size() < static_cast<std::size_t>(cfg.blocks))
    throw ArgumentError("MMSBM needs at least as many nodes as blocks");
  const int n = static_cast<int>(net.nodes.size());
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
  auto local = [&net](int v) {
    return static_cast<int>(std::lower_bound(net.nodes.begin(), net.nodes.end(), v) - net.nodes.begin());
  };
  for (const auto& e : net.edges)
    if (net.contains(e.sender) && net.contains(e.receiver)) y(local(e.sender), local(e.receiver)) = 1.0;

  MmsbmFit best;
  double best_elbo = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
    detail::MmsbmState state(y, cfg, rng);
    std::vector<double> trace{state.elbo()};
    bool converged = false;
    int it = 0;
    while (it < cfg.max_iterations) {
      state.sweep();
      ++it;
      trace.push_back(state.elbo());
      double prev = trace[trace.size() - 2], cur = trace.back();
      if (std::abs(cur - prev) <= cfg.tolerance * std::max(1.0, std::abs(prev))) {
        converged = true;
        break;
      }
    }
    if (trace.back() > best_elbo) {
      best_elbo = trace.back();
      best.nodes = net.nodes;
      best.blocks = cfg.blocks;
      best.membership = state.membership();
      best.block_matrix = state.blocks();
      best.objective = std::move(trace);
      best.converged = converged;
      best.iterations = it;
      best.restart = r;
    }
  }
  return best;
}

/// membership_i' B membership_j.
inline double mmsbm_prob(const MmsbmFit& fit, int i, int j) {
  if (i == j) throw ArgumentError("mmsbm_prob requires i != j");
  auto a = fit.local(i);
  auto b = fit.local(j);
  if (!a || !b) throw ArgumentError("node not in MMSBM fit");
  return fit.membership.row(static_cast<Eigen::Index>(*a)) * fit.block_matrix *
         fit.membership.row(static_cast<Eigen::Index>(*b)).transpose();
}

}  // namespace netcast
